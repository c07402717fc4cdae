"""Distribution diagnostics for sign and floor arrays.

Tallies residues over positive-orthant boxes, the floor-of-linear-form
arrays whose equidistribution drives the sign theorems, and the
normalized exponential sums of the Weyl criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf


@dataclass(frozen=True)
class CountReport:
    """Residue tallies C(m, j; V1..Vn) over the box 1 <= v_i <= V_i."""

    m: int
    counts: tuple
    box: tuple
    total: int

    @property
    def frequencies(self) -> tuple:
        return tuple(Fraction(c, self.total) for c in self.counts)

    def max_bias(self) -> float:
        """Largest |frequency - 1/m| over the residues."""
        return max(abs(f - Fraction(1, self.m)) for f in self.frequencies)


def _box_points(box):
    box = tuple(int(v) for v in box)
    if any(v < 1 for v in box):
        raise ValueError("box sides must be >= 1")

    def rec(dims):
        if not dims:
            yield ()
            return
        first, *rest = dims
        for a in range(1, first + 1):
            for tail in rec(rest):
                yield (a,) + tail

    return rec(box)


def sign_counts(source, m: int, box=None) -> CountReport:
    """Tally residues mod m of an integer-valued array.

    ``source`` is a callable on index vectors (then ``box`` gives the
    sides V_i of the positive orthant box) or a plain iterable of values.
    """
    if m < 2:
        raise ValueError("modulus must be >= 2")
    counts = [0] * m
    if callable(source):
        if box is None:
            raise ValueError("a callable source needs a box")
        total = 0
        for v in _box_points(box):
            counts[int(source(v)) % m] += 1
            total += 1
        box = tuple(int(v) for v in box)
    else:
        values = list(source)
        for x in values:
            counts[int(x) % m] += 1
        total = len(values)
        box = box if box is not None else (total,)
    return CountReport(m, tuple(counts), tuple(box), total)


def floor_array_distribution(betas, theta0, m: int, box) -> CountReport:
    """Distribution of floor(sum v_i beta_i + theta0) mod m over the box.

    Uniform whenever some beta_i is irrational; the caller asserts that,
    it is not machine-checkable.
    """
    betas = [mpf(b) if not isinstance(b, mpf) else b for b in betas]
    t0 = mpf(theta0)

    def value(v):
        return int(mp.floor(mp.fsum(x * b for x, b in zip(v, betas)) + t0))

    return sign_counts(value, m, box)


def weyl_sum(s, h: int, box, precision: int | None = None):
    """|(1/prod V_i) sum_v e^{2 pi i h S(v)}| over the positive box.

    A sequence is uniformly distributed mod 1 exactly when this tends to
    zero for every h != 0. With ``precision`` set, the sum runs on mpmath
    at that many bits; otherwise on floats.
    """
    if h == 0:
        raise ValueError("the Weyl criterion needs h != 0")
    total = 0
    if precision is not None:
        with mp.workprec(precision):
            acc = mp.mpc(0)
            for v in _box_points(box):
                acc += mp.expjpi(2 * h * mpf(s(v)))
                total += 1
            return abs(acc) / total
    re = im = 0.0
    for v in _box_points(box):
        t = 2.0 * math.pi * h * float(s(v))
        re += math.cos(t)
        im += math.sin(t)
        total += 1
    return math.hypot(re, im) / total
