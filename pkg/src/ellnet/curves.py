"""Exact arithmetic on Weierstrass cubics over the rationals.

Curves are long-Weierstrass models y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
with Fraction coefficients. Everything here is exact: the group law, value
sequences of division polynomials, the sequence-to-curve construction, and
reduction checks modulo the primes of the discriminant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from .errors import (
    DegenerateSequenceError,
    DependentPointsError,
    IdentityPointError,
    ModelError,
    NonIntegralModelError,
    NotOnCurveError,
    SingularCurveError,
    SingularPointError,
    TorsionPointError,
    ZeroDivisorError,
)

Rat = Fraction


def _rat(x) -> Fraction:
    """Coerce ints, strings like '69/25' and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class Curve:
    """A Weierstrass cubic with its standard derived invariants."""

    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction
    b2: Fraction
    b4: Fraction
    b6: Fraction
    b8: Fraction
    c4: Fraction
    c6: Fraction
    disc: Fraction
    singular: bool

    def residual(self, x, y) -> Fraction:
        """f(x, y) for the curve equation f = 0; zero iff (x, y) is on the curve."""
        x, y = _rat(x), _rat(y)
        return (
            y * y + self.a1 * x * y + self.a3 * y
            - x * x * x - self.a2 * x * x - self.a4 * x - self.a6
        )

    def point(self, x, y) -> "Point":
        """Construct an affine point, verifying the curve equation exactly."""
        x, y = _rat(x), _rat(y)
        r = self.residual(x, y)
        if r != 0:
            raise NotOnCurveError(x, y, r)
        return Point(self, x, y)

    def identity(self) -> "Point":
        return Point(self, None, None)

    @property
    def j_invariant(self) -> Fraction:
        if self.disc == 0:
            raise SingularCurveError("j-invariant of a singular cubic")
        return self.c4 ** 3 / self.disc

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in (self.a1, self.a2, self.a3, self.a4, self.a6))

    def __repr__(self):
        return f"Curve({self.a1}, {self.a2}, {self.a3}, {self.a4}, {self.a6})"


def curve(a1, a2, a3, a4, a6) -> Curve:
    """Validate coefficients and build a Curve with derived invariants.

    The singular flag is set exactly when the discriminant vanishes;
    singular cubics are representable, only the group law guards them.
    """
    a1, a2, a3, a4, a6 = (_rat(a) for a in (a1, a2, a3, a4, a6))
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    c4 = b2 * b2 - 24 * b4
    c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return Curve(a1, a2, a3, a4, a6, b2, b4, b6, b8, c4, c6, disc, disc == 0)


@dataclass(frozen=True)
class Point:
    """A rational point on a Weierstrass cubic, or the identity (x is None)."""

    curve: Curve
    x: Fraction | None
    y: Fraction | None

    @property
    def is_identity(self) -> bool:
        return self.x is None

    def __neg__(self) -> "Point":
        if self.is_identity:
            return self
        c = self.curve
        return Point(c, self.x, -self.y - c.a1 * self.x - c.a3)

    def __add__(self, other: "Point") -> "Point":
        return add_points(self.curve, self, other)

    def __sub__(self, other: "Point") -> "Point":
        return self + (-other)

    def __rmul__(self, n: int) -> "Point":
        return multiple(self, n)

    def __repr__(self):
        if self.is_identity:
            return "Point(O)"
        return f"Point({self.x}, {self.y})"


@lru_cache(maxsize=None)
def singular_point(c: Curve) -> Point | None:
    """The rational singular point of a singular cubic, if it exists.

    Both partial derivatives vanish there; the x-coordinates are the roots
    of 6x^2 + b2 x + b4 = 0, so a rational singular point needs c4 to be
    a perfect rational square.
    """
    if not c.singular:
        return None
    num, den = c.c4.numerator, c.c4.denominator
    if num < 0:
        return None
    r2 = num * den  # c4 = r^2/den^2 iff num*den is a square
    r = isqrt(r2)
    if r * r != r2:
        return None
    sq = Fraction(r, den)
    for x0 in ((-c.b2 + sq) / 12, (-c.b2 - sq) / 12):
        y0 = -(c.a1 * x0 + c.a3) / 2
        if c.residual(x0, y0) == 0:
            return Point(c, x0, y0)
    return None


def _guard_singular(c: Curve, *pts: Point) -> None:
    if not c.singular:
        return
    s = singular_point(c)
    if s is None:
        return
    for p in pts:
        if not p.is_identity and p.x == s.x and p.y == s.y:
            raise SingularPointError(f"{p} is the singular point of {c}")


def add_points(c: Curve, p: Point, q: Point) -> Point:
    """Chord-tangent addition on the non-singular locus."""
    _guard_singular(c, p, q)
    if p.is_identity:
        return q
    if q.is_identity:
        return p
    x1, y1, x2, y2 = p.x, p.y, q.x, q.y
    if x1 == x2:
        if y1 != y2:
            return c.identity()  # q == -p
        d = 2 * y1 + c.a1 * x1 + c.a3
        if d == 0:
            return c.identity()  # 2-torsion doubled
        lam = (3 * x1 * x1 + 2 * c.a2 * x1 + c.a4 - c.a1 * y1) / d
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam + c.a1 * lam - c.a2 - x1 - x2
    y3 = lam * (x1 - x3) - y1 - c.a1 * x3 - c.a3
    return Point(c, x3, y3)


def _naf(n: int) -> list[int]:
    """Signed binary (non-adjacent form) digits, least significant first."""
    digits = []
    while n:
        if n & 1:
            d = 2 - (n % 4)
            n -= d
        else:
            d = 0
        digits.append(d)
        n //= 2
    return digits


def multiple(p: Point, n: int) -> Point:
    """n*P by left-to-right double-and-add on the signed binary expansion."""
    if n == 0 or p.is_identity:
        return p.curve.identity()
    if n < 0:
        return multiple(-p, -n)
    acc = p.curve.identity()
    for d in reversed(_naf(n)):
        acc = acc + acc
        if d == 1:
            acc = acc + p
        elif d == -1:
            acc = acc - p
    return acc


def linear_combo(c: Curve, points, v) -> Point:
    """Exact v1*P1 + ... + vn*Pn."""
    if len(points) != len(v):
        raise ValueError("coefficient vector and point list have different lengths")
    acc = c.identity()
    for p, n in zip(points, v):
        acc = acc + multiple(p, n)
    return acc


class DivisionPolys:
    """Memoized values psi_n(P) of the division polynomials at a fixed point.

    Seeded with the standard psi_2, psi_3, psi_4 in the b-invariants and
    extended by the elliptic-sequence recurrence
    psi_{m+2} psi_{m-2} = psi_{m+1} psi_{m-1} psi_2^2 - psi_3 psi_m^2.
    """

    def __init__(self, c: Curve, p: Point):
        if p.is_identity:
            raise IdentityPointError("division polynomials need an affine point")
        self.curve = c
        self.point = p
        x, y = p.x, p.y
        psi2 = 2 * y + c.a1 * x + c.a3
        psi3 = 3 * x ** 4 + c.b2 * x ** 3 + 3 * c.b4 * x * x + 3 * c.b6 * x + c.b8
        psi4 = psi2 * (
            2 * x ** 6 + c.b2 * x ** 5 + 5 * c.b4 * x ** 4 + 10 * c.b6 * x ** 3
            + 10 * c.b8 * x * x + (c.b2 * c.b8 - c.b4 * c.b6) * x
            + (c.b4 * c.b8 - c.b6 * c.b6)
        )
        self._memo = {0: Rat(0), 1: Rat(1), 2: psi2, 3: psi3, 4: psi4}
        self._filled = 4

    def __getitem__(self, n: int) -> Fraction:
        if n < 0:
            return -self[-n]
        memo = self._memo
        if n <= self._filled:
            return memo[n]
        w2sq = memo[2] * memo[2]
        w3 = memo[3]
        for m in range(self._filled - 1, n - 1):
            # fills index m+2
            div = memo[m - 2]
            if div == 0:
                raise ZeroDivisorError(
                    f"psi_{m - 2}(P) = 0 while extending to psi_{m + 2} (torsion point?)"
                )
            memo[m + 2] = (memo[m + 1] * memo[m - 1] * w2sq - w3 * memo[m] ** 2) / div
        self._filled = max(self._filled, n)
        return memo[n]


def division_poly_eval(c: Curve, n: int, p: Point) -> Fraction:
    """One-off psi_n(P); the memo table is local to the call."""
    return DivisionPolys(c, p)[n]


def curve_from_eds(w2, w3, w4) -> tuple[Curve, Point]:
    """Cubic curve and point (0,0) whose psi values start 1, w2, w3, w4.

    The whole normalized sequence is then regenerated by the recurrence,
    so psi_n((0,0)) reproduces it for every n.
    """
    w2, w3, w4 = _rat(w2), _rat(w3), _rat(w4)
    if w2 * w3 == 0:
        raise DegenerateSequenceError("need W2*W3 != 0")
    a1 = (w4 + w2 ** 5 - 2 * w2 * w3) / (w2 * w2 * w3)
    a2 = (w2 * w3 * w3 + w4 + w2 ** 5 - w2 * w3) / (w2 ** 3 * w3)
    c = curve(a1, a2, w2, 1, 0)
    return c, Point(c, Rat(0), Rat(0))


def decompose_point(p: Point) -> tuple[int, int, int]:
    """(A, B, D) with x = A/D^2, y = B/D^3 in lowest terms, D >= 1.

    Valid for points on an integral model; anything else raises ModelError.
    """
    if p.is_identity:
        raise IdentityPointError("the identity has no affine decomposition")
    dx = p.x.denominator
    d = isqrt(dx)
    if d * d != dx:
        raise ModelError(f"x-denominator {dx} is not a square")
    if p.y.denominator != d ** 3:
        raise ModelError(
            f"y-denominator {p.y.denominator} is not D^3 for D = {d}"
        )
    return p.x.numerator, p.y.numerator, d


def _prime_factors(n: int) -> list[int]:
    """Distinct prime factors: trial division first, sympy for the cofactor."""
    n = abs(n)
    primes = []
    for q in (2, 3, 5):
        if n % q == 0:
            primes.append(q)
            while n % q == 0:
                n //= q
    d = 7
    while d <= 10 ** 6 and d * d <= n:
        if n % d == 0:
            primes.append(d)
            while n % d == 0:
                n //= d
        d += 2
    if n > 1:
        if d * d > n:
            primes.append(n)
        else:
            from sympy import factorint

            primes.extend(factorint(n).keys())
    return sorted(set(primes))


def nonsingular_reduction_check(c: Curve, p: Point) -> bool:
    """True iff P avoids the singular locus of the reduction mod every
    prime of the discriminant.

    Points whose denominator is divisible by the prime reduce to the
    identity, which is always non-singular.
    """
    if not c.is_integral():
        raise NonIntegralModelError("reduction checks need integer coefficients")
    if c.disc == 0:
        raise SingularCurveError("reduction checks need a non-singular model")
    if p.is_identity:
        return True
    a, b, d = decompose_point(p)
    a1, a2, a3, a4 = (int(c.a1), int(c.a2), int(c.a3), int(c.a4))
    for ell in _prime_factors(c.disc.numerator):
        if d % ell == 0:
            continue  # reduces to the identity
        inv = pow(d, -1, ell)
        xb = a * inv * inv % ell
        yb = b * inv ** 3 % ell
        dfy = (2 * yb + a1 * xb + a3) % ell
        dfx = (a1 * yb - 3 * xb * xb - 2 * a2 * xb - a4) % ell
        if dfy == 0 and dfx == 0:
            return False
    return True


def torsion_order(c: Curve, p: Point, limit: int = 12) -> int | None:
    """n <= limit with n*P = O, or None. 12 covers all rational torsion."""
    if p.is_identity:
        return 1
    acc = p
    for n in range(2, limit + 1):
        acc = acc + p
        if acc.is_identity:
            return n
    return None


def assert_independent(c: Curve, points, bound: int = 6) -> None:
    """Fail fast when some |v|_inf <= bound combination of the points is O.

    An axis hit raises TorsionPointError, anything else DependentPointsError.
    Passing this check is necessary, not sufficient, for independence.
    """
    points = list(points)
    for i, p in enumerate(points):
        if p.is_identity:
            raise TorsionPointError(f"point {i + 1} is the identity")
        n = torsion_order(c, p, limit=max(bound, 12))
        if n is not None:
            raise TorsionPointError(f"point {i + 1} has order {n}")
    multiples = []
    for p in points:
        row = {0: c.identity()}
        for m in range(1, bound + 1):
            row[m] = row[m - 1] + p
            row[-m] = -row[m]
        multiples.append(row)

    def walk(i, acc, coeffs):
        if i == len(points):
            if acc.is_identity and any(coeffs):
                raise DependentPointsError(coeffs)
            return
        for m in range(-bound, bound + 1):
            walk(i + 1, acc + multiples[i][m], coeffs + [m])

    walk(0, c.identity(), [])
