"""Exact elliptic net values for rank 1 and 2 configurations.

A net table memoizes the map v -> W(v) built from curve-coordinate seeds
and the three-term four-factor recurrence. Axis slices are division
polynomial values; the interior is filled column by column with a fixed,
deterministic schedule. Tables can be read in the analytic normalization
(W(e1) = W(e2) = W(e1+e2) = 1) or denominator-cleared, which rescales by
the positive quadratic form built from the points' denominators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import Curve, DivisionPolys, Point, linear_combo
from .errors import DegenerateConfigurationError, ZeroDivisorError

ANALYTIC = "analytic"
SCALED = "scaled"


def _vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _vneg(a):
    return tuple(-x for x in a)


@dataclass(frozen=True)
class NetConfig:
    """One (curve, points) configuration plus the output normalization."""

    curve: Curve
    points: tuple[Point, ...]
    normalization: str = ANALYTIC

    def __post_init__(self):
        if self.normalization not in (ANALYTIC, SCALED):
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if not 1 <= len(self.points) <= 2:
            raise ValueError("exact net tables support rank 1 and 2 only")

    @property
    def rank(self) -> int:
        return len(self.points)


def net_config(curve, points, normalization=ANALYTIC) -> NetConfig:
    return NetConfig(curve, tuple(points), normalization)


def net_seed(config: NetConfig) -> dict[tuple, Fraction]:
    """Exact values on the seed index set.

    Rank 1 seeds the axis; rank 2 adds the three x-difference seeds
    W(1,-1) = x2 - x1, W(2,1) = x1 - x(P1+P2), W(1,2) = x2 - x(P1+P2)
    coming from the classical sigma-quotient identity.
    """
    c = config.curve
    pts = config.points
    for i, p in enumerate(pts):
        if p.is_identity:
            raise DegenerateConfigurationError(f"point {i + 1} is the identity")
    psi = [DivisionPolys(c, p) for p in pts]
    if config.rank == 1:
        return {(n,): psi[0][n] for n in (1, 2, 3, 4)}
    p1, p2 = pts
    if p1.x == p2.x:
        raise DegenerateConfigurationError("P1 = +-P2 makes the net degenerate")
    p12 = p1 + p2
    seeds = {
        (1, 0): Fraction(1),
        (0, 1): Fraction(1),
        (1, 1): Fraction(1),
        (1, -1): p2.x - p1.x,
        (2, 1): p1.x - p12.x,
        (1, 2): p2.x - p12.x,
    }
    for n in (2, 3, 4):
        seeds[(n, 0)] = psi[0][n]
        seeds[(0, n)] = psi[1][n]
    return seeds


class NetTable:
    """Memoized exact net values for one configuration.

    Fill schedule (rank 2): axes from division polynomials, column v1 = 1
    from a four-term recurrence along the column, every cell (a, b) with
    a >= 2 from the s = 0 recurrence instance with p = (a-1, b),
    q = (1, 0), r = (0, 1):

        W(a,b) W(a-2,b) = W(a-1,b+1) W(a-1,b-1) - W(1,-1) W(a-1,b)^2.

    Negative regions come from odd symmetry. A vanishing divisor other
    than the axis special case (a, b) = (2, 0) means the points are
    dependent or torsion and raises ZeroDivisorError.
    """

    def __init__(self, config: NetConfig):
        self.config = config
        self.seeds = net_seed(config)
        self._psi = [DivisionPolys(config.curve, p) for p in config.points]
        self._vals: dict[tuple, Fraction] = dict(self.seeds)
        self._gamma = None

    # -- analytic normalization ------------------------------------------

    def value(self, v) -> Fraction:
        """W(v) in the table's normalization."""
        v = tuple(int(x) for x in v)
        if len(v) != self.config.rank:
            raise ValueError(f"index {v} has wrong rank")
        w = self._analytic(v)
        if self.config.normalization == SCALED:
            w = w * self._form(v)
        return w

    def _analytic(self, v) -> Fraction:
        if self.config.rank == 1:
            return self._psi[0][v[0]]
        a, b = v
        if a < 0 or (a == 0 and b < 0):
            return -self._analytic((-a, -b))
        if a == 0:
            return self._psi[1][b]
        if b == 0 and a >= 0:
            return self._psi[0][a]
        if a == 1:
            return self._col1(b)
        self._ensure(a, b)
        return self._vals[(a, b)]

    def _col1(self, b: int) -> Fraction:
        """Column v1 = 1, grown in both directions from its four seeds by
        the s = 0 instance with p = (1, t-2), q = (0, 1), r = (0, 2):

            W(1,t) W(1,t-4) = psi2(P2)^2 W(1,t-1) W(1,t-3) - psi3(P2) W(1,t-2)^2.
        """
        vals = self._vals
        if (1, b) in vals:
            return vals[(1, b)]
        w2sq = self._psi[1][2] ** 2
        w3 = self._psi[1][3]
        for t in range(3, b + 1):
            if (1, t) in vals:
                continue
            div = vals[(1, t - 4)]
            if div == 0:
                raise ZeroDivisorError(f"W(1,{t - 4}) = 0 in the column fill")
            vals[(1, t)] = (
                w2sq * vals[(1, t - 1)] * vals[(1, t - 3)] - w3 * vals[(1, t - 2)] ** 2
            ) / div
        for t in range(-2, b - 1, -1):
            if (1, t) in vals:
                continue
            div = vals[(1, t + 4)]
            if div == 0:
                raise ZeroDivisorError(f"W(1,{t + 4}) = 0 in the column fill")
            vals[(1, t)] = (
                w2sq * vals[(1, t + 3)] * vals[(1, t + 1)] - w3 * vals[(1, t + 2)] ** 2
            ) / div
        return vals[(1, b)]

    def _ensure(self, a: int, b: int) -> None:
        """Iterative column fill out to (a, b) with the stencil margin."""
        vals = self._vals
        if (a, b) in vals:
            return
        for c in range(2, a + 1):
            margin = a - c
            for bb in range(b - margin, b + margin + 1):
                if bb == 0 or (c, bb) in vals:
                    continue  # axis cells always come from the psi sequences
                vals[(c, bb)] = self._cell(c, bb)

    def _cell(self, a: int, b: int) -> Fraction:
        if (a, b) == (2, 0):
            return self._psi[0][2]
        up = self._at(a - 1, b + 1)
        dn = self._at(a - 1, b - 1)
        mid = self._at(a - 1, b)
        div = self._at(a - 2, b)
        if div == 0:
            raise ZeroDivisorError(
                f"W({a - 2},{b}) = 0 in the fill (dependent or torsion points)"
            )
        return (up * dn - self.seeds[(1, -1)] * mid * mid) / div

    def _at(self, a: int, b: int) -> Fraction:
        """Cell lookup during the fill; columns 0 and 1 compute on demand."""
        if a == 0:
            return self._psi[1][b]
        if b == 0:
            return self._psi[0][a]
        if a == 1:
            return self._col1(b)
        if a < 0:
            return -self._at(-a, -b)
        return self._vals[(a, b)]

    # -- denominator-cleared normalization -------------------------------

    def _form(self, v) -> Fraction:
        if self._gamma is None:
            from .denoms import denom_config, pair_denominator_form

            cfg = denom_config(self.config.curve, self.config.points,
                               check_reduction=False)
            self._gamma = pair_denominator_form(cfg)
        return self._gamma.value(v)

    # -- box access -------------------------------------------------------

    def fill(self, box) -> None:
        for v in box_indices(box):
            self.value(v)

    def grid(self, box) -> dict[tuple, Fraction]:
        return {v: self.value(v) for v in box_indices(box)}


def net_table(config: NetConfig, box=None) -> NetTable:
    """Build a table and fill the given box (index ranges) eagerly."""
    table = NetTable(config)
    if box is not None:
        table.fill(box)
    return table


def net_value(table: NetTable, v) -> Fraction:
    return table.value(v)


def box_indices(box):
    """Iterate an n-dimensional box given as ((min, max), ...) pairs."""
    box = tuple(box)
    if len(box) == 1:
        (lo, hi), = box
        for a in range(lo, hi + 1):
            yield (a,)
    elif len(box) == 2:
        (lo1, hi1), (lo2, hi2) = box
        for a in range(lo1, hi1 + 1):
            for b in range(lo2, hi2 + 1):
                yield (a, b)
    else:
        def rec(dims):
            if not dims:
                yield ()
                return
            (lo, hi), *rest = dims
            for a in range(lo, hi + 1):
                for tail in rec(rest):
                    yield (a,) + tail
        yield from rec(box)


@dataclass
class RecurrenceReport:
    """Residuals of the net recurrence on a batch of index quadruples."""

    results: list
    passed: bool

    @property
    def failures(self):
        return [r for r in self.results if r[1] != 0]


def verify_recurrence(w, quadruples) -> RecurrenceReport:
    """Check W(p+q+s)W(p-q)W(r+s)W(r) + (cyclic in p,q,r) = 0 exactly.

    ``w`` is a NetTable or any callable from index vectors to values, of
    any rank. Per-quadruple evaluation errors are recorded, not raised.
    """
    get = w.value if isinstance(w, NetTable) else w
    results = []
    ok = True
    for p, q, r, s in quadruples:
        p, q, r, s = (tuple(x) for x in (p, q, r, s))
        try:
            res = (
                get(_vadd(_vadd(p, q), s)) * get(_vsub(p, q)) * get(_vadd(r, s)) * get(r)
                + get(_vadd(_vadd(q, r), s)) * get(_vsub(q, r)) * get(_vadd(p, s)) * get(p)
                + get(_vadd(_vadd(r, p), s)) * get(_vsub(r, p)) * get(_vadd(q, s)) * get(q)
            )
        except Exception as exc:  # recorded, not raised
            results.append(((p, q, r, s), None, repr(exc)))
            ok = False
            continue
        results.append(((p, q, r, s), res, None))
        if res != 0:
            ok = False
    return RecurrenceReport(results, ok)


def coordinate_identity_check(table: NetTable, v, i: int) -> bool:
    """Exact check of x(v.P) = x(P_i) - W(v+e_i)W(v-e_i)/W(v)^2.

    Requires the analytic normalization; used both as a seed oracle and
    as a cross-check between the group law and the recurrence fill.
    """
    if table.config.normalization != ANALYTIC:
        raise ValueError("coordinate identity holds in the analytic normalization")
    v = tuple(int(x) for x in v)
    ei = tuple(1 if j == i else 0 for j in range(table.config.rank))
    c = table.config.curve
    combo = linear_combo(c, table.config.points, v)
    if combo.is_identity:
        raise ValueError("v.P is the identity; the identity has no x")
    wv = table.value(v)
    if wv == 0:
        raise ZeroDivisorError(f"W({v}) = 0")
    rhs = table.config.points[i].x - table.value(_vadd(v, ei)) * table.value(_vsub(v, ei)) / wv ** 2
    return combo.x == rhs
