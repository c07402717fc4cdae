"""Closed-form parity prediction for net entries.

The parity of a net value splits into floor terms in the exponents beta_i
plus integer bookkeeping that depends only on which points carry a
negative multiplicative parameter. One exact sign at a probe vector fixes
the remaining binary twist, after which every entry's sign is predicted
in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp

from .analytic import (
    AnalyticContext,
    _EXTRA,
    analytic_context,
    guarded_floor,
    with_escalation,
)
from .curves import Curve, assert_independent
from .errors import BadProbeError, TorsionPointError

CASE_PP = "++"
CASE_NP = "-+"
CASE_PN = "+-"
CASE_NN = "--"


def twist_exponent(v) -> int:
    """sum v_i^2 - sum_{i<j} v_i v_j - 1, the exponent of the companion
    sign (-1)^... that distinguishes a net from its twisted mate."""
    n = len(v)
    return (
        sum(x * x for x in v)
        - sum(v[i] * v[j] for i in range(n) for j in range(i + 1, n))
        - 1
    )


def _beta_sum_floor(vp, bp, precision) -> int:
    with mp.workprec(precision + _EXTRA):
        return guarded_floor(mp.fsum(x * b for x, b in zip(vp, bp)))


def _pair_floor(bi, bj, precision) -> int:
    with mp.workprec(precision + _EXTRA):
        return guarded_floor(bi + bj)


def parity_H(v, ctx: AnalyticContext) -> int:
    """Parity of the net value up to the global twist.

    With coordinates reordered so the negative-u points come first
    (k of them):

        H(v) = sum_{i<j<=k} floor(b_i+b_j) v_i v_j
             + sum_{k<i<j}  floor(b_i+b_j) v_i v_j
             + floor(sum v_i b_i) + sum_{i<=k} floor(v_i/2)   (sum_{i<=k} v_i even)
        H(v) = the same without the floor(sum v_i b_i) term   (odd)

    Floors go through the precision guard and escalate as needed.
    """
    v = tuple(int(x) for x in v)
    if not any(v):
        raise ValueError("the zero vector has no sign")

    def compute(c):
        vp = c.permuted(v)
        bp = c.beta_permuted
        k, n = c.k, c.rank
        total = 0
        for i in range(n):
            for j in range(i + 1, n):
                same_block = (j < k) or (i >= k)
                if same_block and (vp[i] * vp[j]) % 2:
                    total ^= _pair_floor(bp[i], bp[j], c.precision) & 1
        total = (total + sum(vp[i] // 2 for i in range(k))) % 2
        if sum(vp[:k]) % 2 == 0:
            total = (total + _beta_sum_floor(vp, bp, c.precision)) % 2
        return total

    return with_escalation(ctx, compute)


def parity_reduced(v, ctx: AnalyticContext) -> int:
    """The k-aware parity without the pairwise floor(b_i+b_j) cross terms;
    this is the form valid after rescaling by a suitable quadratic form."""
    v = tuple(int(x) for x in v)
    if not any(v):
        raise ValueError("the zero vector has no sign")

    def compute(c):
        vp = c.permuted(v)
        bp = c.beta_permuted
        k = c.k
        total = sum(vp[i] // 2 for i in range(k)) % 2
        if sum(vp[:k]) % 2 == 0:
            total = (total + _beta_sum_floor(vp, bp, c.precision)) % 2
        return total

    return with_escalation(ctx, compute)


def cross_term_parity(v, ctx: AnalyticContext) -> int:
    """parity_H - parity_reduced: the quadratic-form discrepancy between
    the full and the reduced rule, surfaced for inspection."""
    return (parity_H(v, ctx) + parity_reduced(v, ctx)) % 2


def rank2_parity(v, ctx: AnalyticContext, case: str | None = None) -> int:
    """The four specialized rank-2 parity formulas, selected by the sign
    pattern of (u1, u2); defaults to the pattern of the context.

    Agrees with parity_H everywhere; kept as an independently coded
    specialization for cross-checking.
    """
    if ctx.rank != 2:
        raise ValueError("rank2_parity needs a rank-2 context")
    v1, v2 = (int(x) for x in v)
    if v1 == 0 and v2 == 0:
        raise ValueError("the zero vector has no sign")
    if case is None:
        case = ("-" if ctx.u[0] < 0 else "+") + ("-" if ctx.u[1] < 0 else "+")

    def compute(c):
        b1, b2 = c.beta
        p = c.precision

        def fl_lin():
            with mp.workprec(p + _EXTRA):
                return guarded_floor(v1 * b1 + v2 * b2)

        if case == CASE_PP:
            return (fl_lin() + _pair_floor(b1, b2, p) * v1 * v2) % 2
        if case == CASE_NP:
            if v1 % 2 == 0:
                return (fl_lin() + v1 // 2) % 2
            return (v1 // 2) % 2
        if case == CASE_PN:
            if v2 % 2 == 0:
                return (fl_lin() + v2 // 2) % 2
            return (v2 // 2) % 2
        if case == CASE_NN:
            base = (_pair_floor(b1, b2, p) * v1 * v2 + v1 // 2 + v2 // 2) % 2
            if (v1 + v2) % 2 == 0:
                return (base + fl_lin()) % 2
            return base
        raise ValueError(f"unknown case selector {case!r}")

    return with_escalation(ctx, compute)


@dataclass(frozen=True)
class SignPredictor:
    """A calibrated closed-form sign rule for one configuration."""

    ctx: AnalyticContext
    twist: int
    probe: tuple

    def parity(self, v) -> int:
        return (parity_H(v, self.ctx) + self.twist * twist_exponent(v)) % 2

    def predict(self, v) -> int:
        return -1 if self.parity(v) else 1


def next_odd_probe(rank: int, after=None):
    """Lexicographically next strictly positive vector with odd twist
    exponent; the search starts from (1,...,1) when after is None."""

    def iterate():
        # diagonal-by-diagonal lexicographic walk of the positive orthant
        total = rank
        while True:
            for v in _compositions(total, rank):
                yield v
            total += 1

    seen_after = after is None
    for v in iterate():
        if not seen_after:
            if v == tuple(after):
                seen_after = True
            continue
        if twist_exponent(v) % 2:
            return v


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def default_probe(rank: int) -> tuple:
    return (2,) * rank if rank <= 2 else (1,) * rank


def calibrate_twist(ctx: AnalyticContext, probe, exact_sign_at_probe: int) -> int:
    """The twist bit: 0 when (-1)^H already matches the exact sign at the
    probe, 1 otherwise. The probe must have odd twist exponent, or the
    bit would not be observable there."""
    probe = tuple(int(x) for x in probe)
    if twist_exponent(probe) % 2 == 0:
        raise BadProbeError(probe, "even twist exponent",
                            suggestion=next_odd_probe(ctx.rank, after=probe))
    if exact_sign_at_probe == 0:
        raise BadProbeError(probe, "zero net value",
                            suggestion=next_odd_probe(ctx.rank, after=probe))
    h = parity_H(probe, ctx)
    predicted = -1 if h else 1
    return 0 if predicted == exact_sign_at_probe else 1


def predictor_with_twist(ctx: AnalyticContext, twist: int, probe=None) -> SignPredictor:
    """Assemble a predictor from an externally chosen twist bit.

    For rank >= 3 there is no exact net oracle to calibrate against; both
    twist choices give a valid companion net, so conventionally twist=0.
    """
    if any(ctx.torsion_flags):
        raise TorsionPointError("sign rules need points of infinite order")
    return SignPredictor(ctx, twist % 2, tuple(probe) if probe else default_probe(ctx.rank))


def calibrated_predictor(curve: Curve, points, precision: int = 256,
                         probe=None) -> SignPredictor:
    """Build the analytic context, read one exact net sign at the probe,
    and return the calibrated predictor. Rank 1 and 2 only; dependent or
    torsion points fail fast."""
    points = tuple(points)
    if len(points) > 2:
        raise ValueError("exact calibration needs rank <= 2; "
                         "use predictor_with_twist for higher rank")
    assert_independent(curve, points, bound=4)
    ctx = analytic_context(curve, points, precision)
    if any(ctx.torsion_flags):
        raise TorsionPointError("sign rules need points of infinite order")
    probe = tuple(probe) if probe is not None else default_probe(ctx.rank)

    from .nets import NetTable, net_config

    table = NetTable(net_config(curve, points))
    exact = table.value(probe)
    sign = 0 if exact == 0 else (1 if exact > 0 else -1)
    twist = calibrate_twist(ctx, probe, sign)
    return SignPredictor(ctx, twist, probe)


# ---------------------------------------------------------------------------
# Sign bookkeeping for quadratic-form rescalings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticFormSigns:
    """Signs of the multipliers of f(v) = prod g_ii^{v_i^2} prod g_ij^{v_i v_j}."""

    diag: tuple
    off: tuple  # entries ((i, j), sign) with i < j

    def parity(self, v) -> int:
        total = 0
        for i, s in enumerate(self.diag):
            if s < 0:
                total += v[i] * v[i]
        for (i, j), s in self.off:
            if s < 0:
                total += v[i] * v[j]
        return total % 2


def quadratic_form_parity(f: QuadraticFormSigns, v) -> int:
    return f.parity(tuple(int(x) for x in v))


def combined_parity(f: QuadraticFormSigns, v, net_parity: int) -> int:
    """Parity of f(v) * W(v) given the parity of W(v)."""
    return (quadratic_form_parity(f, v) + net_parity) % 2
