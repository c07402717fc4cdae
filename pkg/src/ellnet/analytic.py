"""High-precision real analytics behind the sign formulas.

For a real curve this module produces the multiplicative parameter q with
E(R) isomorphic to R*/q^Z, the normalized parameter u of each rational
point under that isomorphism, the exponents beta driving every parity
formula, and truncated theta products with certified tails.

Everything numeric runs on mpmath at a caller-chosen precision in bits;
floor and sign extractions go through guards that escalate the working
precision rather than silently round.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import mp, mpf

from .curves import Curve, Point, torsion_order
from .errors import (
    IdentityPointError,
    LatticeElementError,
    PrecisionExhaustedError,
    SingularCurveError,
)

DEFAULT_PRECISION = 256
GUARD_BITS = 32
_EXTRA = 48  # working guard bits on top of the requested precision


def max_precision() -> int:
    """Escalation cap; override with ELLNET_MAX_PRECISION."""
    return int(os.environ.get("ELLNET_MAX_PRECISION", "4096"))


def _mpq(x) -> mpf:
    if isinstance(x, Fraction):
        return mpf(x.numerator) / mpf(x.denominator)
    return mpf(x)


class _GuardTripped(Exception):
    """Internal: a floor/sign guard could not be resolved at this precision."""


def guarded_floor(x, guard_bits: int = GUARD_BITS) -> int:
    """floor(x), refusing to answer when x is within 2^-guard_bits of an
    integer. The quantities floored here are provably irrational, so a
    near-integer always means insufficient precision, never a true tie."""
    fl = mp.floor(x)
    frac = x - fl
    if min(frac, 1 - frac) < mpf(2) ** (-guard_bits):
        raise _GuardTripped(f"floor({x}) too close to an integer")
    return int(fl)


def guarded_sign(value, error_bound) -> int:
    """Sign of a computed real with a known error bound."""
    if abs(value) <= 4 * error_bound:
        raise _GuardTripped("sign not resolved by the error bound")
    return 1 if value > 0 else -1


# ---------------------------------------------------------------------------
# Periods and the real multiplicative parameter q
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _cubic_roots(c: Curve, precision: int):
    """Roots of 4x^3 + b2 x^2 + 2 b4 x + b6 (same x as the curve model)."""
    with mp.workprec(precision + _EXTRA):
        coeffs = [mpf(4), _mpq(c.b2), 2 * _mpq(c.b4), _mpq(c.b6)]
        roots = mp.polyroots(coeffs, extraprec=precision // 2 + 40)
        return tuple(roots)


def _periods(c: Curve, precision: int):
    """(omega_re, nu) for the lattice of c.

    omega_re is the least positive real period. For disc > 0 the lattice
    is rectangular and nu is the magnitude of the purely imaginary period;
    for disc < 0 the lattice is rhombic with basis [omega_re,
    (omega_re + i*nu)/2], nu the imaginary extent of 2*omega2 - omega1.
    """
    roots = _cubic_roots(c, precision)
    with mp.workprec(precision + _EXTRA):
        if c.disc > 0:
            e = sorted((r.real if hasattr(r, "real") else r for r in roots),
                       reverse=True)
            e1, e2, e3 = (mpf(x) for x in e)
            om_re = mp.pi / mp.agm(mp.sqrt(e1 - e3), mp.sqrt(e1 - e2))
            nu = mp.pi / mp.agm(mp.sqrt(e1 - e3), mp.sqrt(e2 - e3))
            return om_re, nu
        real_roots = [r for r in roots if abs(mp.im(r)) < mpf(2) ** (-precision // 2)]
        cplx = [r for r in roots if r not in real_roots]
        e1 = mp.re(real_roots[0])
        m = mp.re(cplx[0])
        beta_im = abs(mp.im(cplx[0]))
        a_mod = mp.sqrt((e1 - m) ** 2 + beta_im ** 2)
        om_re = mp.pi / mp.agm(mp.sqrt(a_mod), mp.sqrt((a_mod + (e1 - m)) / 2))
        nu = mp.pi / mp.agm(mp.sqrt(a_mod), mp.sqrt((a_mod - (e1 - m)) / 2))
        return om_re, nu


def real_parameters(c: Curve, precision: int = DEFAULT_PRECISION) -> mpf:
    """The unique real q, 0 < |q| < 1, with E(R) isomorphic to R*/q^Z.

    sign(q) = sign(disc). The returned value is self-checked: the curve
    with coefficients tate_coefficients(q) must reproduce the exact
    j-invariant to within 2^(-precision/2) relative error.
    """
    if c.singular:
        raise SingularCurveError("the Tate parameter needs a non-singular curve")
    om_re, nu = _periods(c, precision)
    with mp.workprec(precision + _EXTRA):
        if c.disc > 0:
            q = mp.exp(-2 * mp.pi * om_re / nu)
        else:
            q = -mp.exp(-mp.pi * om_re / nu)
        jq = _j_from_q(q, precision)
        jx = _mpq(c.j_invariant)
        scale = max(abs(jx), mpf(1))
        if abs(jq - jx) > scale * mpf(2) ** (-(precision // 2)):
            raise PrecisionExhaustedError(
                f"period computation failed a j-invariant cross-check: {jq} vs {jx}"
            )
        return +q


def tate_coefficients(q, precision: int = DEFAULT_PRECISION):
    """Coefficients (a4(q), a6(q)) of the curve y^2 + xy = x^3 + a4 x + a6
    attached to q, from the power sums s_k(q) = sum n^k q^n/(1-q^n).

    Series are summed until the geometric tail bound drops below
    2^-precision.
    """
    with mp.workprec(precision + _EXTRA):
        q = mpf(q)
        if q == 0:
            return mpf(0), mpf(0)
        s3 = _power_sum(q, 3, precision)
        s5 = _power_sum(q, 5, precision)
        a4 = -5 * s3
        a6 = -(5 * s3 + 7 * s5) / 12
        return a4, a6


def _power_sum(q, k, precision):
    total = mpf(0)
    eps = mpf(2) ** (-(precision + 8))
    n = 1
    while True:
        term = mpf(n) ** k * q ** n / (1 - q ** n)
        total += term
        # ratio of successive term bounds is < |q| (1+1/n)^k <= 2^k |q|
        if abs(term) * (2 ** k) * abs(q) / (1 - abs(q)) < eps:
            return total
        n += 1


def _j_from_q(q, precision):
    """j of the q-curve; the discriminant uses the product form
    q*prod(1-q^n)^24, which avoids the cancellation in (c4^3-c6^2)/1728."""
    a4, a6 = tate_coefficients(q, precision)
    c4 = 1 - 48 * a4
    eps = mpf(2) ** (-(precision + 8))
    prod = mpf(1)
    n = 1
    while True:
        f = 1 - q ** n
        prod *= f ** 24
        if abs(q) ** (n + 1) * 48 < eps * (1 - abs(q)):
            break
        n += 1
    delta = q * prod
    return c4 ** 3 / delta


# ---------------------------------------------------------------------------
# The Tate parametrization and per-point parameters
# ---------------------------------------------------------------------------

def _series_terms(q, u, precision):
    """Number of product/series terms needed for arguments u, q."""
    big = max(abs(u), 1 / abs(u), mpf(1))
    eps = mpf(2) ** (-(precision + 16))
    m = 1
    t = abs(q)
    while t * big >= eps:
        t *= abs(q)
        m += 1
    return m + 2


def tate_x(u, q, precision: int = DEFAULT_PRECISION) -> mpf:
    """x-coordinate series of the point with parameter u on the q-curve."""
    with mp.workprec(precision + _EXTRA):
        u, q = mpf(u), mpf(q)
        total = u / (1 - u) ** 2
        nterms = _series_terms(q, u, precision)
        for m in range(1, nterms + 1):
            qm = q ** m
            a = qm * u
            b = qm / u
            total += a / (1 - a) ** 2 + b / (1 - b) ** 2 - 2 * m * qm / (1 - qm)
        return total


def tate_y(u, q, precision: int = DEFAULT_PRECISION) -> mpf:
    """y-coordinate series of the point with parameter u on the q-curve."""
    with mp.workprec(precision + _EXTRA):
        u, q = mpf(u), mpf(q)
        total = u * u / (1 - u) ** 3
        nterms = _series_terms(q, u, precision)
        for m in range(1, nterms + 1):
            qm = q ** m
            a = qm * u
            b = qm / u
            total += a * a / (1 - a) ** 3 - b / (1 - b) ** 3 + m * qm / (1 - qm)
        return total


def _scale_to_q_curve(c: Curve, q, precision):
    """mu^2 with (x + b2/12) = mu^2 (X + 1/12) under the real isomorphism
    from the q-curve to c; the positive square root of mu^2 fixes the
    orientation used throughout."""
    a4q, a6q = tate_coefficients(q, precision)
    c4q = 1 - 48 * a4q
    c6q = -1 + 72 * a4q - 864 * a6q
    c4e = _mpq(c.c4)
    c6e = _mpq(c.c6)
    if c4e != 0 and c6e != 0:
        mu2 = (c6e * c4q) / (c6q * c4e)
    elif c4e == 0:
        mu2 = mp.cbrt(c6e / c6q)
    else:
        mu2 = mp.sqrt(c4e / c4q)
    if mu2 <= 0:
        raise PrecisionExhaustedError("curve scale came out non-positive")
    return mu2


def point_parameter(c: Curve, q, p: Point, precision: int = DEFAULT_PRECISION) -> mpf:
    """Normalized multiplicative parameter u of a rational point.

    Solves the parametrization series for u, picks the orientation
    consistent with y(P), and verifies the round trip back to x(P) to
    within 2^(-precision/2).
    """
    if p.is_identity:
        raise IdentityPointError("the identity has no multiplicative parameter")
    with mp.workprec(precision + _EXTRA):
        q = mpf(q)
        mu2 = _scale_to_q_curve(c, q, precision)
        # The branch of mu^3 orients the parametrization; the other branch
        # would hand every point the parameter of its negative. One branch
        # per lattice shape, pinned against the reference parameter values.
        mu3 = mu2 * mp.sqrt(mu2)
        if q > 0:
            mu3 = -mu3
        x = _mpq(p.x)
        b2 = _mpq(c.b2)
        xt = (x + b2 / 12) / mu2 - mpf(1) / 12
        eta = _mpq(2 * p.y + c.a1 * p.x + c.a3) / mu3
        yt = (eta - xt) / 2

        u = _solve_parameter(c, q, xt, yt, p, precision)
        u = normalize_u(u, q, precision)

        xb = mu2 * (tate_x(u, q, precision) + mpf(1) / 12) - b2 / 12
        if abs(xb - x) > max(abs(x), mpf(1)) * mpf(2) ** (-(precision // 2)):
            raise PrecisionExhaustedError(
                f"round trip through the parametrization missed x(P): {xb} vs {x}"
            )
        return +u


def _solve_parameter(c: Curve, q, xt, yt, p: Point, precision):
    tiny = mpf(2) ** (-(precision + 16))
    if q > 0:
        roots = _cubic_roots(c, precision)
        e = sorted(mp.re(r) for r in roots)
        on_egg = _mpq(p.x) < (e[1] + e[2]) / 2
        if on_egg:
            lo, hi = -1 + tiny, -mp.sqrt(q)
        else:
            lo, hi = mp.sqrt(q), 1 - tiny
    else:
        lo, hi = abs(q), 1 - tiny

    f = lambda u: tate_x(u, q, precision) - xt
    u = _bracket_solve(f, lo, hi, precision)

    # the x-series is two-to-one (u and q^k/u give +-P); let y decide
    conj = q / u if q > 0 else q * q / u
    cand = [u, conj]
    devs = [abs(tate_y(v, q, precision) - yt) for v in cand]
    best = cand[devs.index(min(devs))]
    if min(devs) > max(abs(yt), mpf(1)) * mpf(2) ** (-(precision // 3)):
        raise PrecisionExhaustedError("neither parametrization branch matched y(P)")
    return best


def _bracket_solve(f, lo, hi, precision):
    """Bisection to a safe neighborhood, then Newton by difference quotient."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise PrecisionExhaustedError("parametrization solve lost its bracket")
    for _ in range(max(60, precision // 3)):
        mid = (lo + hi) / 2
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    u = (lo + hi) / 2
    h = (hi - lo) / 4
    tol = mpf(2) ** (-(precision + 8))
    for _ in range(60):
        fu = f(u)
        d = (f(u + h) - f(u - h)) / (2 * h)
        if d == 0:
            break
        step = fu / d
        u -= step
        h = max(abs(step) / 8, mpf(2) ** (-(precision + 24)) * abs(u))
        if abs(step) < tol * max(abs(u), mpf(1)):
            break
    return u


def normalize_u(u0, q, precision: int = DEFAULT_PRECISION) -> mpf:
    """Scale u0 by a power of q into the band q < |u| < 1 (q > 0) or
    q^2 < u < 1 (q < 0)."""
    with mp.workprec(precision + _EXTRA):
        u0, q = mpf(u0), mpf(q)
        if u0 == 0:
            raise LatticeElementError("u = 0")
        if q < 0:
            if u0 < 0:
                raise ValueError("for q < 0 every real class has u > 0")
            base = q * q
            t = mp.log(u0) / mp.log(base)
        else:
            base = q
            t = mp.log(abs(u0)) / mp.log(base)
        fl = mp.floor(t)
        frac = t - fl
        if min(frac, 1 - frac) < mpf(2) ** (-GUARD_BITS):
            raise LatticeElementError(
                "u lies in q^Z (identity) or on the normalization boundary"
            )
        return +(u0 * base ** (-int(fl)))


def beta(u, q, precision: int = DEFAULT_PRECISION) -> mpf:
    """The exponent in (0,1): log_q u, log_q |u|, or half log_|q| u,
    depending on the signs of q and u."""
    with mp.workprec(precision + _EXTRA):
        u, q = mpf(u), mpf(q)
        if q > 0:
            return +(mp.log(abs(u)) / mp.log(q))
        return +(mp.log(u) / mp.log(abs(q)) / 2)


# ---------------------------------------------------------------------------
# Theta products
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaValue:
    value: mpf
    truncation_bound: int
    error_bound: mpf

    def sign(self) -> int:
        return guarded_sign(self.value, self.error_bound)


def theta_eval(w, q, precision: int = DEFAULT_PRECISION) -> ThetaValue:
    """theta(w, q) = (1-w) prod_{m>=1} (1-q^m w)(1-q^m/w)/(1-q^m)^2,
    truncated once the tail cannot move the value by 2^-precision
    relatively; the certified bound is recorded on the result."""
    with mp.workprec(precision + _EXTRA):
        w, q = mpf(w), mpf(q)
        if w == 0:
            raise ValueError("theta needs w != 0")
        if q == 0:
            return ThetaValue(1 - w, 0, mpf(0))
        value = 1 - w
        nterms = _series_terms(q, w, precision)
        for m in range(1, nterms + 1):
            qm = q ** m
            value *= (1 - qm * w) * (1 - qm / w) / (1 - qm) ** 2
        big = max(abs(w), 1 / abs(w)) + 3
        tail = big * abs(q) ** (nterms + 1) / ((1 - abs(q)) ** 2)
        err = abs(value) * 2 * tail
        return ThetaValue(+value, nterms, +err)


# ---------------------------------------------------------------------------
# Analytic context for a configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalyticContext:
    """q, the normalized u_i, the beta_i, and the sign bookkeeping for one
    (curve, points) configuration at a fixed working precision.

    perm lists point indices with the negative-u ones first; k counts
    them. Contexts are immutable; escalate() builds a fresh one at twice
    the precision.
    """

    curve: Curve
    points: tuple[Point, ...]
    precision: int
    q: mpf
    u: tuple
    beta: tuple
    k: int
    perm: tuple
    torsion_flags: tuple

    @property
    def rank(self) -> int:
        return len(self.points)

    def escalate(self) -> "AnalyticContext":
        new_prec = self.precision * 2
        if new_prec > max_precision():
            raise PrecisionExhaustedError(
                f"needed more than the precision cap {max_precision()} bits"
            )
        return analytic_context(self.curve, self.points, new_prec)

    def permuted(self, v):
        """v reordered to match the negative-first point order."""
        return tuple(v[i] for i in self.perm)

    @property
    def beta_permuted(self):
        return tuple(self.beta[i] for i in self.perm)


def analytic_context(curve: Curve, points, precision: int = DEFAULT_PRECISION) -> AnalyticContext:
    points = tuple(points)
    q = real_parameters(curve, precision)
    us = tuple(point_parameter(curve, q, p, precision) for p in points)
    betas = tuple(beta(u, q, precision) for u in us)
    negs = [i for i, u in enumerate(us) if u < 0]
    poss = [i for i, u in enumerate(us) if u > 0]
    flags = tuple(torsion_order(curve, p) is not None for p in points)
    return AnalyticContext(
        curve=curve,
        points=points,
        precision=precision,
        q=q,
        u=us,
        beta=betas,
        k=len(negs),
        perm=tuple(negs + poss),
        torsion_flags=flags,
    )


def with_escalation(ctx: AnalyticContext, fn):
    """Run fn(ctx), rebuilding the context at doubled precision whenever a
    floor or sign guard trips, up to the precision cap."""
    while True:
        try:
            return fn(ctx)
        except _GuardTripped as exc:
            try:
                ctx = ctx.escalate()
            except PrecisionExhaustedError:
                raise PrecisionExhaustedError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Parity of the four factors of the product expansion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OmegaParities:
    """Parities of the four sign-carrying factors of a net value's product
    expansion: the u-power prefactor, the main theta factor, the
    single-argument theta denominators (provably positive, so 0), and the
    pairwise theta denominators."""

    u_prefactor: int
    theta_main: int
    theta_axis: int
    theta_cross: int

    @property
    def total(self) -> int:
        return (self.u_prefactor + self.theta_main + self.theta_axis
                + self.theta_cross) % 2


def omega_parity_components(ctx: AnalyticContext, v) -> OmegaParities:
    """Numeric parity of each factor for index vector v, from direct theta
    evaluations (not the closed-form floor formulas). Serves as the
    independent oracle for the parity theorems."""
    v = tuple(int(x) for x in v)
    if len(v) != ctx.rank:
        raise ValueError("index vector has the wrong rank")
    if not any(v):
        raise ValueError("the zero vector has no sign")

    def compute(ctx):
        with mp.workprec(ctx.precision + _EXTRA):
            n = ctx.rank
            # u-power prefactor: negative u_i contribute (v_i^2 - v_i)/2
            pref = sum(
                (vi * vi - vi) // 2 for vi, ui in zip(v, ctx.u) if ui < 0
            ) % 2
            w = mpf(1)
            for vi, ui in zip(v, ctx.u):
                w *= mpf(ui) ** vi
            main = 0 if theta_eval(w, ctx.q, ctx.precision).sign() > 0 else 1
            axis = 0
            for ui in ctx.u:
                if theta_eval(ui, ctx.q, ctx.precision).sign() < 0:
                    raise PrecisionExhaustedError(
                        "theta(u_i, q) came out negative; this contradicts "
                        "the positivity theorem and means a broken context"
                    )
            cross = 0
            for i in range(n):
                for j in range(i + 1, n):
                    if (v[i] * v[j]) % 2 == 0:
                        continue
                    s = theta_eval(ctx.u[i] * ctx.u[j], ctx.q, ctx.precision).sign()
                    if s < 0:
                        cross ^= 1
            return OmegaParities(pref, main, axis, cross)

    return with_escalation(ctx, compute)
