"""Denominator nets and their signed versions.

Over an integral model every rational point has x = A/D^2, y = B/D^3 in
lowest terms; the positive integers D(v.P) form the denominator net of a
point tuple. Rescaling the exact net by the positive quadratic form built
from the denominators of the P_i and P_i + P_j clears denominators, and,
when every point reduces to a non-singular point at all primes, the
cleared net's magnitudes are exactly the D values. A calibrated sign
predictor then upgrades the denominator net to a genuine elliptic net.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .curves import (
    Curve,
    DivisionPolys,
    Point,
    decompose_point,
    linear_combo,
    nonsingular_reduction_check,
    torsion_order,
)
from .errors import (
    FormViolationError,
    HypothesisViolatedError,
    IdentityCombinationError,
    TorsionPointError,
    ZeroDivisorError,
)
from .signs import SignPredictor


class DenomConfig:
    """A curve with integer coefficients, a tuple of points, and the
    reduction bookkeeping of the signed-net theorem.

    reduction_ok records whether every P_i avoids the singular locus mod
    every prime; pairwise_reduction_ok additionally checks the sums
    P_i + P_j, which is stricter than the theorem needs and reported
    separately.
    """

    def __init__(self, curve: Curve, points, check_reduction: bool = True):
        self.curve = curve
        self.points = tuple(points)
        self._point_cache: dict[tuple, Point] = {}
        self.reduction_ok = None
        self.pairwise_reduction_ok = None
        if check_reduction:
            self.reduction_ok = all(
                nonsingular_reduction_check(curve, p) for p in self.points
            )
            pair_ok = True
            for i in range(len(self.points)):
                for j in range(i + 1, len(self.points)):
                    pair_ok &= nonsingular_reduction_check(
                        curve, self.points[i] + self.points[j]
                    )
            self.pairwise_reduction_ok = pair_ok

    @property
    def rank(self) -> int:
        return len(self.points)

    def point_at(self, v) -> Point:
        v = tuple(int(x) for x in v)
        if v not in self._point_cache:
            self._point_cache[v] = linear_combo(self.curve, self.points, v)
        return self._point_cache[v]


def denom_config(curve: Curve, points, check_reduction: bool = True) -> DenomConfig:
    return DenomConfig(curve, points, check_reduction)


def denom_value(cfg: DenomConfig, v) -> int:
    """The positive integer D with v.P = (A/D^2, B/D^3) in lowest terms."""
    p = cfg.point_at(v)
    if p.is_identity:
        raise IdentityCombinationError(f"{tuple(v)} . P is the identity")
    return decompose_point(p)[2]


@dataclass(frozen=True)
class GammaMatrix:
    """Multipliers of the denominator-clearing quadratic form:
    gamma_ii = D(P_i), gamma_ij = D(P_i+P_j) / (D(P_i) D(P_j))."""

    diag: tuple
    off: tuple  # ((i, j), Fraction) with i < j

    def value(self, v) -> Fraction:
        v = tuple(int(x) for x in v)
        out = Fraction(1)
        for i, g in enumerate(self.diag):
            out *= Fraction(g) ** (v[i] * v[i])
        for (i, j), g in self.off:
            out *= g ** (v[i] * v[j])
        return out


def gamma_matrix(cfg: DenomConfig) -> GammaMatrix:
    diag = []
    for p in cfg.points:
        if p.is_identity:
            raise IdentityCombinationError("gamma entries need affine points")
        diag.append(decompose_point(p)[2])
    off = []
    for i in range(cfg.rank):
        for j in range(i + 1, cfg.rank):
            s = cfg.points[i] + cfg.points[j]
            if s.is_identity:
                raise IdentityCombinationError(f"P{i + 1} + P{j + 1} is the identity")
            dij = decompose_point(s)[2]
            off.append(((i, j), Fraction(dij, diag[i] * diag[j])))
    return GammaMatrix(tuple(diag), tuple(off))


def pair_denominator_form(cfg: DenomConfig) -> GammaMatrix:
    """The clearing form with gamma_ij = D(P_i + P_j) undivided.

    This is the normalization of the reference tables; it coincides with
    gamma_matrix exactly when every P_i is integral, and differs from it
    by the positive square (D_i D_j)^{v_i v_j} otherwise, so signs agree.
    """
    base = gamma_matrix(cfg)
    off = tuple(
        ((i, j), g * base.diag[i] * base.diag[j]) for (i, j), g in base.off
    )
    return GammaMatrix(base.diag, off)


def F_eval(gamma: GammaMatrix, v) -> Fraction:
    """The positive quadratic form prod gamma_ij^{v_i v_j}."""
    return gamma.value(v)


def scaled_net(cfg: DenomConfig, v) -> Fraction:
    """The denominator-cleared net value F_v * Psi_v (rank <= 2).

    Uses the quadratic form with gamma_ij = D(P_i+P_j)/(D_i D_j); its
    magnitudes equal the denominator net under the reduction hypothesis.
    """
    if cfg.rank > 2:
        raise ValueError("exact net values are available for rank <= 2 only")
    if not hasattr(cfg, "_gamma"):
        cfg._gamma = gamma_matrix(cfg)
    return cfg._gamma.value(v) * _net_table(cfg).value(v)


def _net_table(cfg: DenomConfig):
    if not hasattr(cfg, "_table"):
        from .nets import NetTable, net_config

        cfg._table = NetTable(net_config(cfg.curve, cfg.points))
    return cfg._table


def signed_denominator_net(cfg: DenomConfig, pred: SignPredictor, v) -> int:
    """W(v) = (-1)^{predicted parity} * D(v.P), any rank; W(0) = 0.

    Needs the verified reduction hypothesis and a predictor calibrated
    for this configuration.
    """
    v = tuple(int(x) for x in v)
    if not any(v):
        return 0
    if cfg.reduction_ok is not True:
        raise HypothesisViolatedError(
            "the reduction hypothesis is not verified for this configuration"
        )
    return pred.predict(v) * denom_value(cfg, v)


@dataclass
class ComparisonReport:
    entries: list
    passed: bool

    @property
    def failures(self):
        return [e for e in self.entries if not e[-1]]


def verify_psihat_equals_denoms(cfg: DenomConfig, box) -> ComparisonReport:
    """Per-index comparison of |F_v Psi_v| with D(v.P) over a box."""
    if cfg.reduction_ok is not True:
        raise HypothesisViolatedError("comparison needs the reduction hypothesis")
    from .nets import box_indices

    entries = []
    ok = True
    for v in box_indices(box):
        if not any(v):
            continue
        lhs = abs(scaled_net(cfg, v))
        rhs = denom_value(cfg, v)
        good = lhs == rhs
        ok &= good
        entries.append((v, lhs, rhs, good))
    return ComparisonReport(entries, ok)


def shipsey_signs(c: Curve, n: int) -> list:
    """Signed denominator sequence for the special form a6 = 0,
    gcd(a3, a4) = 1, anchored at P = (0, 0).

    W_1 = 1, W_2 = a3, |W_m| = D(mP), and signs propagate by
    Sign[W_{m-2} W_m] = -Sign[A_{(m-1)P}]. For the anchor point,
    x(kP) = -psi_{k-1} psi_{k+1} / psi_k^2, so the A-sign is
    -Sign[psi_{k-1} psi_{k+1}], and the gcd condition makes
    D(mP) = |psi_m(P)|. Returned as w[0..n] with w[0] = 0.
    """
    if not c.is_integral():
        raise FormViolationError("the special form needs integer coefficients")
    if c.a6 != 0:
        raise FormViolationError("the special form needs a6 = 0")
    if gcd(int(c.a3), int(c.a4)) != 1:
        raise FormViolationError("the special form needs gcd(a3, a4) = 1")
    anchor = c.point(0, 0)
    if torsion_order(c, anchor) is not None:
        raise TorsionPointError("(0, 0) has finite order on this curve")
    psi = DivisionPolys(c, anchor)
    w = [0, 1, int(c.a3)]
    for m in range(3, n + 1):
        pm, pm2 = psi[m], psi[m - 2]
        if pm == 0 or pm2 == 0:
            raise ZeroDivisorError(f"psi_{m} or psi_{m - 2} vanishes at (0,0)")
        # Sign[W_{m-2} W_m] = -Sign[A_{(m-1)P}] = Sign[psi_{m-2} psi_m]
        rel = 1 if (pm2 > 0) == (pm > 0) else -1
        sign_prev = 1 if w[m - 2] > 0 else -1
        w.append(sign_prev * rel * abs(int(pm)))
    return w[: n + 1]
