"""Exact geometry core: mixed norms, cylinders, lattice bases, LLL
reduction, Fincke-Pohst enumeration and Minkowski bounds.

Scalars are exact :class:`fractions.Fraction` throughout.  mpmath
supplies arbitrary-precision floats for logarithms, flow factors and
display, but every decision made here (containment, minimality, ties)
reduces to comparisons of exact squared norms.  Irrational constants
enter only through certified rational bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Callable, Iterable, Optional, Sequence

import mpmath

__all__ = [
    "BudgetExceededError",
    "NonGenericLatticeError",
    "SingularBasisError",
    "SearchLimitError",
    "PrecisionPolicy",
    "DEFAULT_POLICY",
    "AmbientVector",
    "Cylinder",
    "LatticeBasis",
    "LatticeVector",
    "mixed_norm",
    "minkowski_bound",
    "minkowski_bound_sq_range",
    "minkowski_leq",
    "a_safe",
    "nearest_int",
    "sqrt_lower",
    "sqrt_upper",
    "kth_root_upper",
    "exact_sqrt",
    "frac_from_mpf",
    "mpf_from_frac",
    "ln_frac",
    "float_from_frac",
    "canonical_sign",
    "lll_columns",
    "fp_enumerate",
    "lll_reduce",
    "enumerate_in_cylinder",
    "shortest_mixed_vectors",
]


class BudgetExceededError(RuntimeError):
    """An enumeration or scan exceeded its node budget."""


class NonGenericLatticeError(ValueError):
    """A decision required by the computation is ambiguous: two lattice
    vectors tie where the underlying theory assumes a strict inequality."""


class SingularBasisError(ValueError):
    """Basis columns are linearly dependent."""


class SearchLimitError(RuntimeError):
    """A growing search exhausted its expansion limit without an answer."""


# ---------------------------------------------------------------------------
# scalar helpers


def nearest_int(x: Fraction) -> int:
    """Nearest integer to ``x``, halves rounded down (toward -inf)."""
    return (2 * x.numerator + x.denominator - 1) // (2 * x.denominator)


def floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def sqrt_lower(x: Fraction, guard_bits: int = 0) -> Fraction:
    """Rational lower bound on sqrt(x); tightens as ``guard_bits`` grows."""
    if x < 0:
        raise ValueError("negative argument")
    num, den = x.numerator, x.denominator
    g = guard_bits
    return Fraction(isqrt(num * den << (2 * g)), den << g)


def sqrt_upper(x: Fraction, guard_bits: int = 0) -> Fraction:
    """Rational upper bound on sqrt(x)."""
    if x < 0:
        raise ValueError("negative argument")
    num, den = x.numerator, x.denominator
    g = guard_bits
    return Fraction(isqrt(num * den << (2 * g)) + 1, den << g)


def _iroot(n: int, k: int) -> int:
    """Floor of the k-th root of a nonnegative integer."""
    if n < 0:
        raise ValueError("negative argument")
    if n == 0:
        return 0
    if k == 1:
        return n
    if k == 2:
        return isqrt(n)
    x = 1 << (-(-n.bit_length() // k))
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    return x


def kth_root_upper(x: Fraction, k: int, guard_bits: int = 0) -> Fraction:
    """Rational upper bound on x**(1/k) for x >= 0."""
    if x < 0:
        raise ValueError("negative argument")
    if k == 1:
        return x
    g = guard_bits
    num = x.numerator << (k * g)
    den = x.denominator
    # (num * den^(k-1))^(1/k) / (den * 2^g) >= x^(1/k) / 2^... scale check:
    # x = num0/den; x^(1/k) = (num0*den^(k-1))^(1/k)/den.
    r = _iroot(num * den ** (k - 1), k) + 1
    return Fraction(r, den << g)


def exact_sqrt(x: Fraction) -> Optional[Fraction]:
    """sqrt(x) when x is the square of a rational, else None."""
    if x < 0:
        return None
    sn = isqrt(x.numerator)
    sd = isqrt(x.denominator)
    if sn * sn == x.numerator and sd * sd == x.denominator:
        return Fraction(sn, sd)
    return None


def frac_from_mpf(x: "mpmath.mpf") -> Fraction:
    """Exact rational value of a finite mpf."""
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    man = int(man)  # gmpy backend hands out mpz
    exp = int(exp)
    if man == 0:
        if exp != 0:
            raise ValueError("non-finite value")
        return Fraction(0)
    v = Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)
    return -v if sign else v


def mpf_from_frac(x: Fraction, prec: int = 53) -> "mpmath.mpf":
    with mpmath.mp.workprec(prec):
        return mpmath.mpf(x.numerator) / x.denominator


def ln_frac(x: Fraction, prec: int = 53) -> "mpmath.mpf":
    """log(x) for positive rational x of arbitrary magnitude."""
    if x <= 0:
        raise ValueError("log of nonpositive value")
    with mpmath.mp.workprec(prec + 10):
        return mpmath.log(mpmath.mpf(x.numerator)) - mpmath.log(
            mpmath.mpf(x.denominator)
        )


def float_from_frac(x: Fraction) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf if x.numerator > 0 else -math.inf


def _pi_bounds(prec: int) -> tuple[Fraction, Fraction]:
    with mpmath.mp.workprec(prec):
        p = +mpmath.mp.pi
    v = frac_from_mpf(p)
    slack = Fraction(1, 1 << (prec - 10))
    return v - slack, v + slack


PI_LO, PI_HI = _pi_bounds(200)

# unit-ball volumes V_k = coeff * pi**pi_pow
_BALL_VOLUMES: dict[int, tuple[Fraction, int]] = {
    1: (Fraction(2), 0),
    2: (Fraction(1), 1),
    3: (Fraction(4, 3), 1),
    4: (Fraction(1, 2), 2),
}


def minkowski_bound(d: int, c: int) -> float:
    """2**(d+c) / (V_d * V_c), the sharp bound on q_{n+1}^c r_n^d."""
    cd, pd = _BALL_VOLUMES[d]
    cc, pc = _BALL_VOLUMES[c]
    return float(2 ** (d + c) / (cd * cc)) / math.pi ** (pd + pc)


def minkowski_bound_sq_range(
    d: int, c: int, prec: int = 200
) -> tuple[Fraction, Fraction]:
    """Certified rational bounds (lo, hi) on the square of the Minkowski
    constant; lo == hi exactly when the constant is rational."""
    cd, pd = _BALL_VOLUMES[d]
    cc, pc = _BALL_VOLUMES[c]
    rat = Fraction(2 ** (d + c)) / (cd * cc)
    p = pd + pc
    if p == 0:
        return rat * rat, rat * rat
    lo_pi, hi_pi = _pi_bounds(prec)
    return rat * rat / hi_pi ** (2 * p), rat * rat / lo_pi ** (2 * p)


def minkowski_leq(value_sq: Fraction, d: int, c: int) -> bool:
    """Exact decision of value <= C_{d,c} given value**2, escalating the
    precision of the pi bounds until the comparison is unambiguous."""
    prec = 200
    while prec <= 4000:
        lo, hi = minkowski_bound_sq_range(d, c, prec)
        if value_sq <= lo:
            return True
        if value_sq > hi:
            return False
        if lo == hi:
            return value_sq <= lo
        prec *= 2
    raise NonGenericLatticeError(
        "value coincides with the Minkowski constant beyond 4000 bits"
    )


def a_safe(d: int, c: int) -> int:
    """Safe cap on the number of sign-canonical lattice points a minimal
    vector's cylinder can contain in any chain step."""

    def n_of(k: int) -> int:
        ceil_sqrt = isqrt(k - 1) + 1 if k > 0 else 0
        return (4 * ceil_sqrt + 1) ** k

    return n_of(d) * n_of(c) + 1


# ---------------------------------------------------------------------------
# precision policy


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working precision for approximate lattices.

    Flow factors are computed as ``bits``-bit floats and then frozen to
    exact rationals; squared-norm equality on such data is decided up to
    the relative tolerance 2**-(bits - guard_bits).
    """

    bits: int = 128
    guard_bits: int = 16

    @property
    def rel_tol_sq(self) -> Fraction:
        return Fraction(1, 1 << (self.bits - self.guard_bits))

    def tol_for(self, basis: "LatticeBasis") -> Fraction:
        if basis.precision_bits is None:
            return Fraction(0)
        bits = min(basis.precision_bits, self.bits)
        return Fraction(1, 1 << (bits - self.guard_bits))

    def sq_close(self, a: Fraction, b: Fraction, tol: Optional[Fraction] = None) -> bool:
        t = self.rel_tol_sq if tol is None else tol
        return abs(a - b) <= t * max(abs(a), abs(b), Fraction(1))


DEFAULT_POLICY = PrecisionPolicy()


# ---------------------------------------------------------------------------
# ambient objects


@dataclass(frozen=True)
class AmbientVector:
    """Point of R^d x R^c; ``plus`` is the expanding block, ``minus`` the
    contracting one."""

    plus: tuple[Fraction, ...]
    minus: tuple[Fraction, ...]

    @classmethod
    def make(cls, plus: Iterable, minus: Iterable) -> "AmbientVector":
        return cls(
            tuple(Fraction(t) for t in plus), tuple(Fraction(t) for t in minus)
        )

    @property
    def norm_plus_sq(self) -> Fraction:
        return sum((t * t for t in self.plus), Fraction(0))

    @property
    def norm_minus_sq(self) -> Fraction:
        return sum((t * t for t in self.minus), Fraction(0))

    @property
    def mixed_norm_sq(self) -> Fraction:
        return max(self.norm_plus_sq, self.norm_minus_sq)


def mixed_norm(v: AmbientVector) -> float:
    """max of the Euclidean norms of the two blocks."""
    return math.sqrt(float_from_frac(v.mixed_norm_sq))


@dataclass(frozen=True)
class Cylinder:
    """Product B_d(0, r_plus) x B_c(0, r_minus), stored via squared radii."""

    r_plus_sq: Fraction
    r_minus_sq: Fraction

    @classmethod
    def from_radii(cls, r_plus, r_minus) -> "Cylinder":
        rp = Fraction(r_plus)
        rm = Fraction(r_minus)
        if rp < 0 or rm < 0:
            raise ValueError("radii must be nonnegative")
        return cls(rp * rp, rm * rm)

    @property
    def r_plus(self) -> float:
        return math.sqrt(float_from_frac(self.r_plus_sq))

    @property
    def r_minus(self) -> float:
        return math.sqrt(float_from_frac(self.r_minus_sq))

    def contains_sq(self, width_sq: Fraction, height_sq: Fraction) -> bool:
        return width_sq <= self.r_plus_sq and height_sq <= self.r_minus_sq

    def contains(self, v: AmbientVector) -> bool:
        return self.contains_sq(v.norm_plus_sq, v.norm_minus_sq)


@dataclass(frozen=True)
class LatticeVector:
    """Lattice point with exact physical squared norms.

    ``y`` are integer coordinates in the originating basis; ``raw`` are
    ambient coordinates before division by sqrt(scale_sq).
    """

    y: tuple[int, ...]
    raw: tuple[Fraction, ...]
    scale_sq: Fraction
    d: int
    c: int
    width_sq: Fraction
    height_sq: Fraction

    @property
    def mixed_sq(self) -> Fraction:
        return max(self.width_sq, self.height_sq)

    def ambient(self) -> AmbientVector:
        return AmbientVector(tuple(self.raw[: self.d]), tuple(self.raw[self.d :]))

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(
            tuple(-t for t in self.y),
            tuple(-t for t in self.raw),
            self.scale_sq,
            self.d,
            self.c,
            self.width_sq,
            self.height_sq,
        )


def canonical_sign(y: Sequence[int], d: int) -> tuple[int, ...]:
    """Flip the sign of y so its first nonzero entry, scanning the minus
    block before the plus block, is positive."""
    for i in list(range(d, len(y))) + list(range(d)):
        if y[i] > 0:
            return tuple(y)
        if y[i] < 0:
            return tuple(-t for t in y)
    return tuple(y)


@dataclass(frozen=True)
class LatticeBasis:
    """Full-rank basis of a lattice in R^d x R^c.

    ``columns[j]`` lists the ambient coordinates of the j-th basis vector
    before division by sqrt(scale_sq); keeping the scale factored out lets
    chart lattices with irrational normalization stay exact.
    ``precision_bits`` is None for exact data and otherwise records the
    float precision the entries were frozen from.
    """

    d: int
    c: int
    columns: tuple[tuple[Fraction, ...], ...]
    scale_sq: Fraction = Fraction(1)
    precision_bits: Optional[int] = None

    def __post_init__(self) -> None:
        m = self.d + self.c
        if len(self.columns) != m or any(len(col) != m for col in self.columns):
            raise ValueError("need d+c columns of length d+c")
        object.__setattr__(
            self,
            "columns",
            tuple(tuple(Fraction(t) for t in col) for col in self.columns),
        )
        object.__setattr__(self, "scale_sq", Fraction(self.scale_sq))
        if self.scale_sq <= 0:
            raise ValueError("scale_sq must be positive")

    @property
    def m(self) -> int:
        return self.d + self.c

    @classmethod
    def identity(cls, d: int, c: int) -> "LatticeBasis":
        m = d + c
        cols = tuple(
            tuple(Fraction(1 if i == j else 0) for i in range(m)) for j in range(m)
        )
        return cls(d, c, cols)

    @classmethod
    def from_theta(cls, theta: Sequence[Sequence[Fraction]]) -> "LatticeBasis":
        """Basis mapping integer (P, Q) to (P - theta Q, Q); ``theta`` is a
        list of c columns of length d."""
        c = len(theta)
        d = len(theta[0])
        m = d + c
        cols = []
        for i in range(d):
            cols.append(tuple(Fraction(1 if r == i else 0) for r in range(m)))
        for j in range(c):
            col = [-Fraction(theta[j][i]) for i in range(d)]
            col += [Fraction(1 if r == j else 0) for r in range(c)]
            cols.append(tuple(col))
        return cls(d, c, tuple(cols))

    def vector(self, y: Sequence[int]) -> LatticeVector:
        m = self.m
        raw = [Fraction(0)] * m
        for j, yj in enumerate(y):
            if yj:
                col = self.columns[j]
                for i in range(m):
                    raw[i] += yj * col[i]
        wsq = sum((t * t for t in raw[: self.d]), Fraction(0)) / self.scale_sq
        hsq = sum((t * t for t in raw[self.d :]), Fraction(0)) / self.scale_sq
        return LatticeVector(tuple(y), tuple(raw), self.scale_sq, self.d, self.c, wsq, hsq)

    def det_raw(self) -> Fraction:
        """Determinant of the raw column matrix."""
        m = self.m
        a = [[self.columns[j][i] for j in range(m)] for i in range(m)]
        det = Fraction(1)
        for k in range(m):
            piv = None
            for r in range(k, m):
                if a[r][k] != 0:
                    piv = r
                    break
            if piv is None:
                return Fraction(0)
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                det = -det
            det *= a[k][k]
            inv = a[k][k]
            for r in range(k + 1, m):
                if a[r][k] != 0:
                    f = a[r][k] / inv
                    for s in range(k, m):
                        a[r][s] -= f * a[k][s]
        return det

    def det_sq(self) -> Fraction:
        """Squared covolume of the physical lattice."""
        dr = self.det_raw()
        return dr * dr / self.scale_sq ** self.m

    def is_unimodular(self, tol: Fraction = Fraction(0)) -> bool:
        return abs(self.det_sq() - 1) <= tol


# ---------------------------------------------------------------------------
# integer-column kernel: LLL and Fincke-Pohst


def _gram(cols: Sequence[Sequence[int]]) -> list[list[int]]:
    m = len(cols)
    return [
        [sum(cols[i][t] * cols[j][t] for t in range(len(cols[i]))) for j in range(m)]
        for i in range(m)
    ]


def _gso(gram: Sequence[Sequence[int]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Gram-Schmidt data from a Gram matrix: mu (unit lower triangular)
    and the squared norms of the orthogonalized vectors."""
    m = len(gram)
    mu = [[Fraction(0)] * m for _ in range(m)]
    dvec = [Fraction(0)] * m
    for i in range(m):
        mu[i][i] = Fraction(1)
        for j in range(i):
            s = Fraction(gram[i][j])
            for k in range(j):
                s -= mu[i][k] * mu[j][k] * dvec[k]
            if dvec[j] == 0:
                raise SingularBasisError("dependent columns")
            mu[i][j] = s / dvec[j]
        s = Fraction(gram[i][i])
        for k in range(i):
            s -= mu[i][k] * mu[i][k] * dvec[k]
        dvec[i] = s
        if dvec[i] <= 0:
            raise SingularBasisError("dependent columns")
    return mu, dvec


def lll_columns(
    cols: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)
) -> tuple[list[list[int]], list[list[int]]]:
    """LLL-reduce integer columns; returns (reduced columns, transform U)
    with reduced = original . U and U unimodular (columns convention)."""
    m = len(cols)
    b = [list(col) for col in cols]
    u = [[1 if i == j else 0 for i in range(m)] for j in range(m)]
    if m == 1:
        return b, u

    def refresh() -> tuple[list[list[Fraction]], list[Fraction]]:
        return _gso(_gram(b))

    mu, dvec = refresh()
    k = 1
    rounds = 0
    while k < m:
        rounds += 1
        if rounds > 100000:
            raise RuntimeError("reduction failed to terminate")
        changed = False
        for j in range(k - 1, -1, -1):
            q = mu[k][j]
            r = (2 * q.numerator + q.denominator) // (2 * q.denominator)
            if r:
                for t in range(len(b[k])):
                    b[k][t] -= r * b[j][t]
                for t in range(m):
                    u[k][t] -= r * u[j][t]
                changed = True
        if changed:
            mu, dvec = refresh()
        if dvec[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * dvec[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            u[k], u[k - 1] = u[k - 1], u[k]
            mu, dvec = refresh()
            k = max(k - 1, 1)
    return b, u


def fp_enumerate(
    cols: Sequence[Sequence[int]],
    bound_sq: Fraction,
    visit: Callable[[tuple[int, ...]], None],
    budget: int = 10**7,
) -> int:
    """Visit every nonzero integer combination y with |cols . y|^2 <=
    bound_sq (Euclidean, both of +-y).  Returns nodes used; raises
    BudgetExceededError when the traversal exceeds ``budget`` nodes."""
    m = len(cols)
    mu, dvec = _gso(_gram(cols))
    if bound_sq < 0:
        return 0
    y = [0] * m
    nodes = 0

    def descend(i: int, remaining: Fraction) -> None:
        nonlocal nodes
        # center of the admissible interval for y_i given y_{i+1..m-1}
        ci = Fraction(0)
        for j in range(i + 1, m):
            if y[j]:
                ci -= mu[j][i] * y[j]
        half = sqrt_upper(remaining / dvec[i])
        lo = ceil_frac(ci - half)
        hi = floor_frac(ci + half)
        for yi in range(lo, hi + 1):
            nodes += 1
            if nodes > budget:
                raise BudgetExceededError(
                    f"enumeration exceeded budget of {budget} nodes"
                )
            diff = yi - ci
            used = diff * diff * dvec[i]
            if used > remaining:
                continue
            y[i] = yi
            if i == 0:
                if any(y):
                    visit(tuple(y))
            else:
                descend(i - 1, remaining - used)
        y[i] = 0

    descend(m - 1, Fraction(bound_sq))
    return nodes


# ---------------------------------------------------------------------------
# public wrappers on LatticeBasis


def _int_columns(basis: LatticeBasis) -> tuple[list[list[int]], int]:
    """Clear denominators: integer columns plus the common scale L such
    that int_cols = L * raw columns."""
    den = 1
    for col in basis.columns:
        for t in col:
            den = den * t.denominator // math.gcd(den, t.denominator)
    cols = [[int(t * den) for t in col] for col in basis.columns]
    return cols, den


def lll_reduce(basis: LatticeBasis) -> tuple[LatticeBasis, tuple[tuple[int, ...], ...]]:
    """LLL-reduced basis of the same lattice plus the unimodular column
    transform relating it to the input."""
    cols, den = _int_columns(basis)
    red, u = lll_columns(cols)
    new_cols = tuple(tuple(Fraction(t, den) for t in col) for col in red)
    out = LatticeBasis(
        basis.d, basis.c, new_cols, basis.scale_sq, basis.precision_bits
    )
    return out, tuple(tuple(col) for col in u)


def _matvec_int(cols: Sequence[Sequence[int]], y: Sequence[int]) -> list[int]:
    n = len(cols[0])
    out = [0] * n
    for j, yj in enumerate(y):
        if yj:
            cj = cols[j]
            for i in range(n):
                out[i] += yj * cj[i]
    return out


def enumerate_in_cylinder(
    basis: LatticeBasis,
    cyl: Cylinder,
    *,
    budget: int = 10**7,
) -> list[LatticeVector]:
    """All sign-canonical nonzero lattice vectors in the closed cylinder.

    Output is sorted by (height_sq, width_sq, y).  Containment is decided
    exactly on squared norms; eccentric cylinders are rebalanced by a
    power-of-two change of variables before enumeration so the Euclidean
    relaxation stays tight.
    """
    cols, den = _int_columns(basis)
    d, m = basis.d, basis.m
    den_sq = den * den
    # bounds on raw squared norms (physical * scale_sq), then int-scaled
    rp = cyl.r_plus_sq * basis.scale_sq * den_sq
    rm = cyl.r_minus_sq * basis.scale_sq * den_sq
    if rp < 0 or rm < 0:
        return []
    # rebalance: scale the narrow block up by 2^a.  A zero radius pins its
    # block to exact zero: scaling by 2^a with 4^a > bound expels every
    # integer point with a nonzero coordinate there from the search ball.
    aw = ah = 0
    if rp > 0 and rm > 0:
        if rm > rp:
            ratio = rm / rp
            aw = (ratio.numerator // ratio.denominator).bit_length() // 2
        else:
            ratio = rp / rm
            ah = (ratio.numerator // ratio.denominator).bit_length() // 2
    elif rp == 0 and rm > 0:
        aw = (rm.numerator // rm.denominator).bit_length() // 2 + 1
    elif rm == 0 and rp > 0:
        ah = (rp.numerator // rp.denominator).bit_length() // 2 + 1
    work = [list(col) for col in cols]
    if aw:
        for col in work:
            for i in range(d):
                col[i] <<= aw
    if ah:
        for col in work:
            for i in range(d, m):
                col[i] <<= ah
    bound = rp * (1 << (2 * aw)) + rm * (1 << (2 * ah))
    red, u = lll_columns(work)
    hits: list[tuple[int, ...]] = []

    def visit(yred: tuple[int, ...]) -> None:
        hits.append(yred)

    fp_enumerate(red, bound, visit, budget=budget)
    seen: set[tuple[int, ...]] = set()
    out: list[LatticeVector] = []
    for yred in hits:
        yorig = canonical_sign(_matvec_int(u, yred), d)
        if yorig in seen:
            continue
        seen.add(yorig)
        raw_int = _matvec_int(cols, yorig)
        wsq_i = sum(t * t for t in raw_int[:d])
        hsq_i = sum(t * t for t in raw_int[d:])
        if wsq_i > rp or hsq_i > rm:
            continue
        wsq = Fraction(wsq_i, den_sq) / basis.scale_sq
        hsq = Fraction(hsq_i, den_sq) / basis.scale_sq
        raw = tuple(Fraction(t, den) for t in raw_int)
        out.append(
            LatticeVector(yorig, raw, basis.scale_sq, d, basis.c, wsq, hsq)
        )
    out.sort(key=lambda v: (v.height_sq, v.width_sq, v.y))
    return out


def shortest_mixed_vectors(
    basis: LatticeBasis, *, budget: int = 10**7
) -> list[LatticeVector]:
    """All sign-canonical vectors achieving the mixed-norm first minimum.

    The search radius starts from the Minkowski bound for the mixed ball
    and doubles on the (theoretically impossible, numerically conceivable)
    chance of an empty window.
    """
    det_sq = basis.det_sq()
    if det_sq == 0:
        raise SingularBasisError("degenerate basis")
    _, c_sq_hi = minkowski_bound_sq_range(basis.d, basis.c)
    # lambda_1^(2m) <= C^2 * det^2
    r_sq = kth_root_upper(c_sq_hi * det_sq, basis.m, guard_bits=4)
    for _ in range(80):
        found = enumerate_in_cylinder(
            basis, Cylinder(r_sq, r_sq), budget=budget
        )
        if found:
            lam_sq = min(v.mixed_sq for v in found)
            return [v for v in found if v.mixed_sq == lam_sq]
        r_sq *= 4
    raise SearchLimitError("no lattice vector found within expanded radius")
