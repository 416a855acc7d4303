"""Shared oracles for the test suite.

The brute-force cylinder scan is the ground truth the lattice kernel is
measured against: it knows nothing about LLL, bounds, or pruning, it
just walks an integer coefficient box and keeps what lands inside.
"""

import itertools
import random
from fractions import Fraction

from diolab.core import Cylinder, LatticeBasis, canonical_sign


def brute_cylinder(basis, cyl, box):
    """Sign-canonical nonzero vectors inside the cylinder, by scanning
    coefficients in [-box, box]^m; sorted like enumerate_in_cylinder."""
    seen = {}
    for y in itertools.product(range(-box, box + 1), repeat=basis.m):
        if not any(y):
            continue
        ys = canonical_sign(y, basis.d)
        if ys in seen:
            continue
        v = basis.vector(ys)
        if cyl.contains_sq(v.width_sq, v.height_sq):
            seen[ys] = v
    return sorted(seen.values(), key=lambda v: (v.height_sq, v.width_sq, v.y))


def random_unimodular_basis(rng, d, c, ops=5):
    """Identity basis stirred by a few elementary unimodular column
    operations; entries stay small so the brute box stays honest."""
    m = d + c
    cols = [[Fraction(1 if i == j else 0) for i in range(m)] for j in range(m)]
    for _ in range(ops):
        a = rng.randrange(m)
        b = rng.randrange(m)
        if a == b:
            continue
        s = rng.choice((-1, 1))
        for i in range(m):
            cols[a][i] += s * cols[b][i]
    return LatticeBasis(d, c, tuple(tuple(col) for col in cols))


def random_cylinder(rng):
    rp = Fraction(rng.randrange(1, 9), rng.randrange(1, 5))
    rm = Fraction(rng.randrange(1, 9), rng.randrange(1, 5))
    return Cylinder(rp, rm)


def _inverse(cols):
    """Exact inverse of a column matrix (entries cols[j][i])."""
    m = len(cols)
    a = [[Fraction(cols[j][i]) for j in range(m)] for i in range(m)]
    inv = [[Fraction(1 if i == j else 0) for j in range(m)] for i in range(m)]
    for k in range(m):
        piv = next(r for r in range(k, m) if a[r][k] != 0)
        a[k], a[piv] = a[piv], a[k]
        inv[k], inv[piv] = inv[piv], inv[k]
        f = a[k][k]
        a[k] = [t / f for t in a[k]]
        inv[k] = [t / f for t in inv[k]]
        for r in range(m):
            if r != k and a[r][k] != 0:
                g = a[r][k]
                a[r] = [t - g * s for t, s in zip(a[r], a[k])]
                inv[r] = [t - g * s for t, s in zip(inv[r], inv[k])]
    return inv


def safe_box(basis, cyl):
    """Coefficient bound guaranteeing the brute scan sees the whole
    cylinder: |y_i| <= row_sum(B^-1) * cylinder radius."""
    inv = _inverse(basis.columns)
    r_max = max(cyl.r_plus_sq, cyl.r_minus_sq)
    # ambient coordinates inside the cylinder are bounded by sqrt(r_max)
    bound = 0
    for row in inv:
        row_sum = sum(abs(t) for t in row)
        need = row_sum * row_sum * r_max * basis.scale_sq
        k = 1
        while k * k < need:
            k += 1
        bound = max(bound, k)
    return bound
