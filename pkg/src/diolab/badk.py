"""Inductive construction of a 2x1 vector whose denominators are badly
approximable at offset one but not at offset zero.

Everything here is exact rational arithmetic: square roots never get
evaluated, all norm comparisons are done on squares via the identity
sqrt(a) + sqrt(b) <= sqrt(u)  iff  u >= a + b and 4ab <= (u - a - b)^2.

State n consists of a rational vector theta_n with lowest common
denominator Q_n.  A step picks a primitive point alpha_n = k_n theta_n +
(a_n, b_n) of the lattice Z^2 + Z theta_n in a prescribed open quadrant,
an integer p_n in the window [10 Q_n L_n^2, 20 Q_n L_n^2] with
L_n = |alpha_n|, and moves to theta_{n+1} = theta_n + eps_n / Q_n where
eps_n = alpha_n / (p_n - k_n/Q_n); then Q_{n+1} = p_n Q_n - k_n.  The
seven inductive conditions are enforced during the step and re-verified
from scratch by certify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .bestapprox import direct_scan
from .core import (
    BudgetExceededError,
    Cylinder,
    LatticeBasis,
    SearchLimitError,
    ceil_frac,
    enumerate_in_cylinder,
    floor_frac,
    nearest_int,
)

__all__ = [
    "BadConstructionState",
    "StepRecord",
    "CertifyReport",
    "PrefixStats",
    "init_state",
    "step",
    "certify",
    "certificate",
    "prefix_statistics",
    "sqrt_affine_leq",
]

Pair = tuple[Fraction, Fraction]


def sqrt_affine_leq(a: Fraction, b: Fraction, u: Fraction) -> bool:
    """Exact test of sqrt(a) + sqrt(b) <= sqrt(u) for nonnegative
    rationals."""
    if a < 0 or b < 0 or u < 0:
        raise ValueError("arguments must be nonnegative")
    rest = u - a - b
    if rest < 0:
        return False
    return 4 * a * b <= rest * rest


def _r_sq(theta: Pair, q: int) -> Fraction:
    """Squared distance of q*theta to Z^2."""
    total = Fraction(0)
    for t in theta:
        x = q * t
        z = nearest_int(x)
        total += (x - z) ** 2
    return total


def _lcd(theta: Pair) -> int:
    return math.lcm(theta[0].denominator, theta[1].denominator)


def _gauss_minima_sq(
    v1: tuple[int, int], v2: tuple[int, int]
) -> tuple[Fraction, Fraction, tuple[int, int], tuple[int, int]]:
    """Lagrange-reduce a rank-2 integer basis; returns the two successive
    minima squared and the reduced basis attaining them."""
    a, b = v1, v2
    na = a[0] * a[0] + a[1] * a[1]
    nb = b[0] * b[0] + b[1] * b[1]
    if na > nb:
        a, b, na, nb = b, a, nb, na
    while True:
        dot = a[0] * b[0] + a[1] * b[1]
        r = nearest_int(Fraction(dot, na))
        b = (b[0] - r * a[0], b[1] - r * a[1])
        nb = b[0] * b[0] + b[1] * b[1]
        if nb >= na:
            return Fraction(na), Fraction(nb), a, b
        a, b, na, nb = b, a, nb, na


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    return old_r, old_s, old_t


def _hnf_basis(u: int, v: int, q: int) -> tuple[int, int, int]:
    """Hermite basis (d1, c), (0, q/d1) of the integer lattice
    Z(u, v) + qZ^2, assuming gcd(u, v, q) = 1."""
    u %= q
    v %= q
    g, s, _ = _xgcd(u, q)
    y0 = q // g
    c = (s * v) % y0 if y0 > 1 else 0
    return g, c, y0


def _solve_k(gamma: tuple[int, int], u: int, v: int, q: int) -> int:
    """k in [0, q) with gamma = k*(u, v) mod q, for gcd(u, v, q) = 1."""
    if q == 1:
        return 0
    g2, s2, t2 = _xgcd(u, v)
    if g2 == 0:
        raise ValueError("theta must not be an integer vector")
    rhs = (s2 * gamma[0] + t2 * gamma[1]) % q
    k = (rhs * pow(g2, -1, q)) % q
    if (k * u - gamma[0]) % q or (k * v - gamma[1]) % q:
        raise AssertionError("k recovery failed")
    return k


def _annulus_min_width_sq(
    theta: Pair, q_lo: int, q_hi: int, seed_w_sq: Fraction, budget: int
) -> Optional[Fraction]:
    """Smallest d(q theta, Z^2)^2 over integers q_lo < q < q_hi, or None
    when the range is empty."""
    if q_hi - q_lo < 2:
        return None
    basis = LatticeBasis.from_theta((theta,))
    h_cap = Fraction((q_hi - 1) ** 2)
    w_sq = seed_w_sq if seed_w_sq > 0 else Fraction(1, q_hi)
    lo_sq = q_lo * q_lo
    for _ in range(80):
        vecs = enumerate_in_cylinder(basis, Cylinder(w_sq, h_cap), budget=budget)
        found = [v.width_sq for v in vecs if v.height_sq > lo_sq]
        if found:
            return min(found)
        w_sq *= 4
    raise SearchLimitError("gap search radius exhausted")


@dataclass(frozen=True)
class StepRecord:
    """Search outcome producing theta_{n+1} from theta_n; d_sq is the
    squared window scale 1/(Q_n L_n)^2."""

    n: int
    gamma: tuple[int, int]
    alpha: Pair
    k: int
    ab: tuple[int, int]
    p: int
    p_count: int
    L_sq: Fraction
    d_sq: Fraction
    eps: Pair
    eps_norm_sq: Fraction
    q_next: int


@dataclass(frozen=True)
class BadConstructionState:
    """Prefix of the inductive construction.

    Tables hold, per column j, the squared quantities from which the gap
    minima M_{i,j} = sqrt(A) - sqrt(B) and drop minima m_{i,j} read off;
    entries are None when the denominator gap contains no integer.
    """

    n: int
    thetas: tuple[Pair, ...]
    q_list: tuple[int, ...]
    eps_list: tuple[Pair, ...]
    steps: tuple[StepRecord, ...]
    M_table: dict
    m_table: dict
    certified_mask: int = 0

    @property
    def theta(self) -> Pair:
        return self.thetas[-1]

    @property
    def Q(self) -> int:
        return self.q_list[-1]


def _extend_tables(
    M_tab: dict, m_tab: dict, thetas, q_list, j: int, budget: int
) -> None:
    """Fill column j of both tables (quantities of theta_j)."""
    theta_j = thetas[j]
    r_cache = {i: _r_sq(theta_j, q_list[i]) for i in range(j + 1)}
    for i in range(1, j + 1):
        if (i, j) not in m_tab:
            m_tab[(i, j)] = (r_cache[i - 1], r_cache[i])
        if i < j and (i, j) not in M_tab:
            gap = _annulus_min_width_sq(
                theta_j, q_list[i - 1], q_list[i], 4 * r_cache[i - 1], budget
            )
            M_tab[(i, j)] = None if gap is None else (gap, r_cache[i - 1])


def init_state() -> BadConstructionState:
    """Seed state at n=1: theta_0 = (0,0), theta_1 = (1/5, 1/5)."""
    theta0 = (Fraction(0), Fraction(0))
    theta1 = (Fraction(1, 5), Fraction(1, 5))
    eps0 = (Fraction(1, 5), Fraction(1, 5))
    M_tab: dict = {}
    m_tab: dict = {}
    _extend_tables(M_tab, m_tab, (theta0, theta1), (1, 5), 1, 10**7)
    return BadConstructionState(
        n=1,
        thetas=(theta0, theta1),
        q_list=(1, 5),
        eps_list=(eps0,),
        steps=(),
        M_table=M_tab,
        m_table=m_tab,
    )


def _quadrant_candidates(
    b1: tuple[int, int], b2: tuple[int, int], lo_sq: int, hi_sq: int
) -> list[tuple[int, int, int]]:
    """Primitive points of the lattice spanned by the reduced basis
    (b1, b2) with both coordinates positive and lo_sq < norm^2 <= hi_sq,
    sorted by (norm^2, x, y).

    Coefficients are enumerated directly, so the cost is proportional to
    the number of lattice points in the disk, not to its radius."""
    out = []
    n1 = b1[0] * b1[0] + b1[1] * b1[1]
    n2b = b2[0] * b2[0] + b2[1] * b2[1]
    d12 = b1[0] * b2[1] - b1[1] * b2[0]
    dot = b1[0] * b2[0] + b1[1] * b2[1]
    m2_max = math.isqrt(hi_sq * n1 // (d12 * d12)) + 1
    for m2 in range(-m2_max, m2_max + 1):
        # n1 m1^2 + 2 m1 m2 dot + m2^2 n2b <= hi_sq
        disc = (m2 * dot) ** 2 - n1 * (m2 * m2 * n2b - hi_sq)
        if disc < 0:
            continue
        sq = math.isqrt(disc)
        for m1 in range((-m2 * dot - sq) // n1 - 1, (-m2 * dot + sq) // n1 + 2):
            x = m1 * b1[0] + m2 * b2[0]
            y = m1 * b1[1] + m2 * b2[1]
            if x <= 0 or y <= 0:
                continue
            nsq = x * x + y * y
            if lo_sq < nsq <= hi_sq and math.gcd(m1, m2) == 1:
                out.append((nsq, x, y))
    out.sort()
    return out


def step(
    state: BadConstructionState,
    x_search_bound: int = 1 << 16,
    *,
    budget: int = 10**7,
    q_budget: int = 10**30,
) -> BadConstructionState:
    """One inductive step; deterministic (smallest admissible candidate,
    then smallest window integer).

    x_search_bound caps the growth factor of the candidate search radius
    over its lower bound |gamma|^2 = n Q_n; raise it if the step reports
    exhaustion.
    """
    n = state.n
    Q = state.Q
    theta = state.theta
    u = int(theta[0] * Q) % Q
    v = int(theta[1] * Q) % Q
    d1, cc, y0 = _hnf_basis(u, v, Q)
    _, _, rb1, rb2 = _gauss_minima_sq((d1, cc), (0, y0))
    M_tab = dict(state.M_table)
    m_tab = dict(state.m_table)
    _extend_tables(M_tab, m_tab, state.thetas, state.q_list, n, budget)
    eps_prev_sq = (
        state.eps_list[-1][0] ** 2 + state.eps_list[-1][1] ** 2
    )
    base_sq = max(n * Q, 1)
    lo_sq = base_sq - 1
    hi_sq = 4 * base_sq
    growth = 1
    while growth <= x_search_bound:
        for n2, x, y in _quadrant_candidates(rb1, rb2, lo_sq, hi_sq):
            gamma = (x, y) if n % 2 == 0 else (-x, -y)
            p_lo = ceil_frac(Fraction(10 * n2, Q))
            p_hi = floor_frac(Fraction(20 * n2, Q))
            p_count = p_hi - p_lo + 1
            if p_count < 2 or p_lo < 2:
                continue
            k = _solve_k(gamma, u, v, Q)
            q_next = p_lo * Q - k
            if q_next > q_budget:
                raise BudgetExceededError(
                    "denominator budget exceeded: %d > %d" % (q_next, q_budget)
                )
            eps = (Fraction(gamma[0], q_next), Fraction(gamma[1], q_next))
            e_sq = eps[0] ** 2 + eps[1] ** 2
            if not e_sq < eps_prev_sq:
                continue
            drift_sq = 64 * e_sq
            ok = True
            for key, ab in m_tab.items():
                if ab is not None and not sqrt_affine_leq(drift_sq, ab[1], ab[0]):
                    ok = False
                    break
            if ok:
                for key, ab in M_tab.items():
                    if ab is not None and not sqrt_affine_leq(
                        drift_sq, ab[1], ab[0]
                    ):
                        ok = False
                        break
            if not ok:
                continue
            alpha = (Fraction(gamma[0], Q), Fraction(gamma[1], Q))
            ab_vec = (
                int(alpha[0] - k * theta[0]),
                int(alpha[1] - k * theta[1]),
            )
            if (alpha[0] - k * theta[0]) != ab_vec[0] or (
                alpha[1] - k * theta[1]
            ) != ab_vec[1]:
                raise AssertionError("alpha decomposition failed")
            theta_next = (theta[0] + eps[0] / Q, theta[1] + eps[1] / Q)
            if _lcd(theta_next) != q_next:
                raise AssertionError("lowest common denominator mismatch")
            # the new shortest vector must be +-eps with the right sign
            gam_next = (
                int(eps[0] * q_next),
                int(eps[1] * q_next),
            )
            u2 = int(theta_next[0] * q_next) % q_next
            v2 = int(theta_next[1] * q_next) % q_next
            g1, g2c, g3 = _hnf_basis(u2, v2, q_next)
            lam1_sq, lam2_sq, _, _ = _gauss_minima_sq((g1, g2c), (0, g3))
            if lam1_sq != Fraction(n2):
                continue
            if not 4 * lam1_sq <= lam2_sq <= 900 * lam1_sq:
                continue
            sign = 1 if n % 2 == 0 else -1
            if not (sign * eps[0] > 0 and sign * eps[1] > 0):
                raise AssertionError("quadrant sign violated")
            rec = StepRecord(
                n,
                gamma,
                alpha,
                k,
                ab_vec,
                p_lo,
                p_count,
                Fraction(n2, Q * Q),
                Fraction(1, n2),
                eps,
                e_sq,
                q_next,
            )
            return BadConstructionState(
                n=n + 1,
                thetas=state.thetas + (theta_next,),
                q_list=state.q_list + (q_next,),
                eps_list=state.eps_list + (eps,),
                steps=state.steps + (rec,),
                M_table=M_tab,
                m_table=m_tab,
            )
        lo_sq = hi_sq
        hi_sq *= 4
        growth *= 2
    raise SearchLimitError(
        "x_search_bound=%d exhausted at n=%d" % (x_search_bound, n)
    )


@dataclass(frozen=True)
class CertifyReport:
    """Outcome of the independent re-verification at state n."""

    n: int
    conditions: dict
    lam1_sq: Fraction
    lam2_sq: Fraction
    vacuous: tuple[str, ...]
    scanned: bool


def certify(
    state: BadConstructionState,
    *,
    budget: int = 10**7,
    scan_cap: int = 10**6,
) -> CertifyReport:
    """Re-verify the seven inductive conditions from theta_n alone.

    Raises AssertionError with the offending datum on any violation;
    shares no intermediate data with step (tables are recomputed, the
    denominator list is re-derived by gap enumeration, and a direct scan
    cross-checks it while Q_n is small enough).
    """
    n = state.n
    theta = state.theta
    qs = state.q_list
    conditions = {}
    vacuous = []
    if _lcd(theta) != qs[-1]:
        raise AssertionError("det invariant broken: lcd != Q_n")

    # condition 1: Q_0..Q_n are exactly the best denominators of theta_n
    r_at = {i: _r_sq(theta, qs[i]) for i in range(n + 1)}
    if r_at[n] != 0:
        raise AssertionError("theta_n not terminal at its own denominator")
    for i in range(1, n + 1):
        if not r_at[i] < r_at[i - 1]:
            raise AssertionError("distances fail to decrease at i=%d" % i)
        # a tie with r_{i-1} is allowed: a tying height is not a record
        gap = _annulus_min_width_sq(theta, qs[i - 1], qs[i], 4 * r_at[i - 1], budget)
        if gap is not None and gap < r_at[i - 1]:
            raise AssertionError(
                "gap (%d, %d) beats r_{i-1}: %s < %s"
                % (qs[i - 1], qs[i], gap, r_at[i - 1])
            )
    scanned = False
    if qs[-1] <= scan_cap:
        recs = direct_scan((theta,), qs[-1])
        if tuple(int(r.Q[0]) for r in recs) != qs:
            raise AssertionError("direct scan disagrees with Q list")
        scanned = True
    conditions["best_denominators"] = True

    # condition 2: growth and recorded branching
    for j in range(1, n + 1):
        if not qs[j] > 2 * j * qs[j - 1]:
            raise AssertionError("growth fails at j=%d" % j)
    for rec in state.steps:
        if rec.p_count < 2:
            raise AssertionError("no branching at recorded step %d" % rec.n)
    conditions["growth_and_branching"] = True

    # conditions 3-5 need the fresh tables up to column n
    M_tab: dict = {}
    m_tab: dict = {}
    for j in range(1, n + 1):
        _extend_tables(M_tab, m_tab, state.thetas, qs, j, budget)
    if n >= 2:
        for i in range(1, n):
            ab = M_tab[(i, n)]
            if ab is not None and not ab[0] > ab[1]:
                raise AssertionError("M_{%d,%d} <= 0" % (i, n))
        conditions["gap_minima_positive"] = True
    else:
        vacuous.append("gap_minima_positive")
    delta = (theta[0] - state.thetas[-2][0], theta[1] - state.thetas[-2][1])
    drift_sq = 64 * qs[-2] ** 2 * (delta[0] ** 2 + delta[1] ** 2)
    pairs_M = [(i, j) for (i, j) in M_tab if j <= n - 1]
    pairs_m = [(i, j) for (i, j) in m_tab if j <= n - 1]
    if pairs_M:
        for key in pairs_M:
            ab = M_tab[key]
            if ab is not None and not sqrt_affine_leq(drift_sq, ab[1], ab[0]):
                raise AssertionError("drift beats M at %s" % (key,))
        conditions["drift_below_gap_minima"] = True
    else:
        vacuous.append("drift_below_gap_minima")
    if pairs_m:
        for key in pairs_m:
            ab = m_tab[key]
            if ab is not None and not sqrt_affine_leq(drift_sq, ab[1], ab[0]):
                raise AssertionError("drift beats m at %s" % (key,))
        conditions["drift_below_drop_minima"] = True
    else:
        vacuous.append("drift_below_drop_minima")

    # conditions 6-7 on the lattice of theta_n
    eps = state.eps_list[-1]
    gam = (eps[0] * qs[-1], eps[1] * qs[-1])
    if gam[0].denominator != 1 or gam[1].denominator != 1:
        raise AssertionError("eps_{n-1} is not in the lattice")
    gam = (int(gam[0]), int(gam[1]))
    u = int(theta[0] * qs[-1]) % qs[-1]
    v = int(theta[1] * qs[-1]) % qs[-1]
    d1, cc, y0 = _hnf_basis(u, v, qs[-1])
    lam1_sq, lam2_sq, _, _ = _gauss_minima_sq((d1, cc), (0, y0))
    if Fraction(gam[0] ** 2 + gam[1] ** 2) != lam1_sq:
        raise AssertionError("eps_{n-1} is not a shortest vector")
    sign = 1 if (n - 1) % 2 == 0 else -1
    if not (sign * eps[0] > 0 and sign * eps[1] > 0):
        raise AssertionError("sign alternation violated at n=%d" % n)
    conditions["shortest_vector_sign"] = True
    if not 4 * lam1_sq <= lam2_sq <= 900 * lam1_sq:
        raise AssertionError(
            "second minimum ratio out of range: %s, %s" % (lam1_sq, lam2_sq)
        )
    conditions["second_minimum_ratio"] = True
    lam1_frac = lam1_sq / qs[-1] ** 2
    lam2_frac = lam2_sq / qs[-1] ** 2
    return CertifyReport(n, conditions, lam1_frac, lam2_frac, tuple(vacuous), scanned)


@dataclass(frozen=True)
class PrefixStats:
    """Exact prefix diagnostics of the separation: a = min q_i r_i^2
    should sink, b = min q_{i+1} r_i^2 should stay bounded away from 0."""

    n: int
    a: Fraction
    b: Fraction
    a_terms: tuple[Fraction, ...]
    b_terms: tuple[Fraction, ...]


def prefix_statistics(state: BadConstructionState) -> PrefixStats:
    theta = state.theta
    qs = state.q_list
    a_terms = []
    b_terms = []
    for i in range(state.n):
        r_sq = _r_sq(theta, qs[i])
        a_terms.append(qs[i] * r_sq)
        b_terms.append(qs[i + 1] * r_sq)
    return PrefixStats(
        state.n, min(a_terms), min(b_terms), tuple(a_terms), tuple(b_terms)
    )


def certificate(
    state: BadConstructionState, reports: tuple[CertifyReport, ...]
) -> dict:
    """JSON-ready payload: one row per certified index, every quantity an
    exact fraction string."""
    by_n = {rep.n: rep for rep in reports}
    recs = {rec.n + 1: rec for rec in state.steps}
    rows = []
    for idx in sorted(by_n):
        rep = by_n[idx]
        theta_idx = state.thetas[idx]
        row = {
            "n": idx,
            "theta": [str(theta_idx[0]), str(theta_idx[1])],
            "Q": state.q_list[idx],
            "conditions": dict(rep.conditions),
            "vacuous": list(rep.vacuous),
            "scanned": rep.scanned,
            "lam1_sq": str(rep.lam1_sq),
            "lam2_sq": str(rep.lam2_sq),
            "q_next_sq_r_fourth": str(
                (state.q_list[idx] * _r_sq(theta_idx, state.q_list[idx - 1])) ** 2
            ),
        }
        rec = recs.get(idx)
        if rec is not None:
            row["alpha"] = [str(rec.alpha[0]), str(rec.alpha[1])]
            row["k"] = rec.k
            row["p"] = rec.p
            row["p_count"] = rec.p_count
            row["eps"] = [str(rec.eps[0]), str(rec.eps[1])]
        stats = prefix_statistics(
            BadConstructionState(
                n=idx,
                thetas=state.thetas[: idx + 1],
                q_list=state.q_list[: idx + 1],
                eps_list=state.eps_list[:idx],
                steps=tuple(r for r in state.steps if r.n < idx),
                M_table={},
                m_table={},
            )
        )
        row["prefix_min_q_r_sq"] = str(stats.a)
        row["prefix_min_qnext_r_sq"] = str(stats.b)
        rows.append(row)
    return {"d": 2, "c": 1, "steps": rows}
