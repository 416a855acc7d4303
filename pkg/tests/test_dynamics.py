"""Diagonal flow, minimal-vector chains, transversal membership, and the
two first-return routes."""

import random
from fractions import Fraction

import pytest

from diolab.bestapprox import chain_engine, sample_theta
from diolab.core import (
    LatticeBasis,
    NonGenericLatticeError,
    a_safe,
    ln_frac,
)
from diolab.dynamics import (
    SurfacePoint1D,
    SurfacePoint2D,
    apply_flow,
    apply_flow_log,
    chart_lattice_1d,
    chart_lattice_2d,
    first_return,
    minimal_vectors,
    return_map_explicit_1d,
    sample_surface_point_1d,
    surface_coordinates_1d,
    surface_first_return_1d,
    surface_membership_S,
    surface_membership_Sprime,
    visiting_times,
)


def fib(n):
    seq = [0, 1, 1]
    a, b = 1, 1
    for _ in range(n - 2):
        a, b = b, a + b
        seq.append(b)
    return seq


def theta_basis(bits, seed, d=1, c=1):
    theta = sample_theta(d, c, bits, random.Random(seed))
    return theta, LatticeBasis.from_theta(theta)


# ---------------------------------------------------------------------------
# flow


def test_apply_flow_zero_is_identity():
    basis = LatticeBasis.identity(1, 1)
    assert apply_flow(basis, 0) is basis
    assert apply_flow_log(basis, Fraction(1)) is basis


def test_apply_flow_preserves_covolume():
    _, basis = theta_basis(64, 5)
    flowed = apply_flow(basis, 0.37)
    assert flowed.precision_bits == 128
    assert abs(flowed.det_sq() - 1) < Fraction(1, 1 << 110)


def test_apply_flow_scales_blocks():
    _, basis = theta_basis(64, 6)
    flowed = apply_flow(basis, 0.37)
    v0 = basis.vector((1, 2))
    v1 = flowed.vector((1, 2))
    import math

    assert float(v1.width_sq / v0.width_sq) == pytest.approx(
        math.exp(2 * 0.37), rel=1e-12
    )
    assert float(v1.height_sq / v0.height_sq) == pytest.approx(
        math.exp(-2 * 0.37), rel=1e-12
    )


# ---------------------------------------------------------------------------
# chains


def test_chain_z2_terminates_both_ways():
    chain = minimal_vectors(LatticeBasis.identity(1, 1), 5)
    assert [(e.n, e.vector.y) for e in chain.entries] == [(0, (1, 0)), (1, (0, 1))]
    assert chain.backward_finite and chain.forward_finite
    assert chain.entry(0).class_size == 1
    with pytest.raises(KeyError):
        chain.entry(7)


def test_chain_z3_class_sizes():
    chain = minimal_vectors(LatticeBasis.identity(2, 1), 5)
    assert [(e.n, e.vector.y) for e in chain.entries] == [
        (0, (1, 0, 0)),
        (1, (0, 0, 1)),
    ]
    assert chain.entry(0).class_size == 2
    assert chain.entry(1).class_size == 1
    assert all(e.certified for e in chain.entries)


def test_chain_fibonacci_heights_are_records():
    f = fib(31)
    x = Fraction(f[30], f[31])
    basis = LatticeBasis.from_theta(((x,),))
    chain = minimal_vectors(basis, 40)
    recs = chain_engine(((x,),), depth=40)
    assert len(chain.entries) == len(recs) + 1 == 30
    assert chain.entries[0].vector.y == (1, 0)
    for entry, rec in zip(chain.entries[1:], recs):
        assert entry.vector.y == (rec.P[0], rec.Q[0])
        assert entry.vector.height_sq == rec.q_sq
        assert entry.vector.width_sq == rec.r_sq
    assert chain.forward_finite and chain.backward_finite


def test_chain_matches_records_random():
    rng = random.Random(31)
    for d, c in ((1, 1), (2, 1)):
        for _ in range(4):
            theta = sample_theta(d, c, 64, rng)
            basis = LatticeBasis.from_theta(theta)
            chain = minimal_vectors(basis, 9)
            recs = chain_engine(theta, depth=8)
            for entry, rec in zip(chain.entries[1:], recs):
                assert entry.vector.y == (*rec.P, *rec.Q)
                assert entry.vector.height_sq == rec.q_sq
                assert entry.vector.width_sq == rec.r_sq


def test_chain_class_sizes_bounded():
    rng = random.Random(32)
    cap = a_safe(1, 1)
    for _ in range(5):
        theta = sample_theta(1, 1, 48, rng)
        chain = minimal_vectors(LatticeBasis.from_theta(theta), 12)
        assert all(1 <= e.class_size <= cap for e in chain.entries)


def test_chain_flow_equivariance():
    _, basis = theta_basis(64, 33)
    base = minimal_vectors(basis, 12, certify=False)
    flowed = minimal_vectors(apply_flow(basis, 0.7), 12, certify=False)
    ys_a = [e.vector.y for e in base.entries]
    ys_b = [e.vector.y for e in flowed.entries]
    # same chain of classes, possibly renumbered: one sequence contains
    # a long contiguous run of the other
    assert ys_b[0] in ys_a
    k = ys_a.index(ys_b[0])
    n = min(len(ys_a) - k, len(ys_b))
    assert n >= 8
    assert ys_a[k : k + n] == ys_b[:n]


def test_chain_count_validation():
    with pytest.raises(ValueError):
        minimal_vectors(LatticeBasis.identity(1, 1), 0)


# ---------------------------------------------------------------------------
# visiting times


def test_visiting_times_ratios_exact():
    _, basis = theta_basis(64, 40)
    chain = minimal_vectors(basis, 7)
    vt = visiting_times(chain)
    by_n = {e.n: e.vector for e in chain.entries}
    for (n, ratio) in vt.ratio_sq:
        assert ratio == by_n[n + 1].height_sq / by_n[n].width_sq
    for (n, ratio) in vt.ratio_sq_prime:
        assert ratio == by_n[n].height_sq / by_n[n].width_sq
    m = basis.d + basis.c
    for (n, t), (_, ratio) in zip(vt.t, vt.ratio_sq):
        assert t == pytest.approx(float(ln_frac(ratio, 60)) / (2 * m), abs=1e-13)


def test_visiting_times_land_on_transversal():
    _, basis = theta_basis(64, 41)
    chain = minimal_vectors(basis, 6)
    vt = visiting_times(chain)
    for (n, ratio) in vt.ratio_sq:
        if n < 1:
            continue
        mem = surface_membership_S(apply_flow_log(basis, ratio))
        assert mem.member, f"t[{n}] missed S: {mem.reason}"
    for (n, ratio) in vt.ratio_sq_prime:
        if n < 1:
            continue
        mem = surface_membership_Sprime(apply_flow_log(basis, ratio))
        assert mem.member, f"t'[{n}] missed S': {mem.reason}"


def test_visiting_times_need_two_entries():
    chain = minimal_vectors(LatticeBasis.identity(1, 1), 1)
    with pytest.raises(ValueError):
        visiting_times(chain)


# ---------------------------------------------------------------------------
# membership


def test_z2_fails_on_corner():
    mem = surface_membership_S(LatticeBasis.identity(1, 1))
    assert not mem.member
    assert mem.reason == "corner vector on the critical ball"
    assert mem.corner.y == (-1, 1)
    assert not surface_membership_Sprime(LatticeBasis.identity(1, 1)).member


def test_z3_fails_on_corner():
    mem = surface_membership_S(LatticeBasis.identity(2, 1))
    assert not mem.member
    assert mem.corner is not None


def test_sprime_frozen_corner_lattice():
    basis = LatticeBasis(1, 1, ((1, Fraction(3, 5)), (Fraction(3, 5), 1)))
    mem = surface_membership_Sprime(basis)
    assert mem.member
    assert mem.corner.y == (-1, 1)
    assert mem.lam1_sq == Fraction(4, 25)
    assert not surface_membership_S(basis).member


# ---------------------------------------------------------------------------
# d = c = 1 chart


def test_chart_point_validation():
    with pytest.raises(ValueError):
        SurfacePoint1D(Fraction(0), Fraction(1, 2), 1)
    with pytest.raises(ValueError):
        SurfacePoint1D(Fraction(1, 2), Fraction(1), 1)
    with pytest.raises(ValueError):
        SurfacePoint1D(Fraction(1, 2), Fraction(1, 2), 2)


def test_chart_round_trip_exact():
    rng = random.Random(50)
    for _ in range(15):
        p = sample_surface_point_1d(rng, bits=24)
        q = surface_coordinates_1d(chart_lattice_1d(p))
        assert (q.x, q.y, q.eps) == (p.x, p.y, p.eps)


def test_first_return_frozen():
    p = SurfacePoint1D(Fraction(3, 10), Fraction(1, 2), 1)
    fr = first_return(chart_lattice_1d(p))
    assert fr.ratio_sq == Fraction(1225, 9)
    assert fr.tau == pytest.approx(1.228367886410652, abs=1e-14)
    q = surface_coordinates_1d(fr.basis_after)
    assert (q.x, q.y, q.eps) == (Fraction(1, 3), Fraction(2, 7), -1)


def test_explicit_map_frozen():
    p = SurfacePoint1D(Fraction(7, 10), Fraction(3, 10), 1)
    q, ratio_sq = return_map_explicit_1d(p)
    assert (q.x, q.y, q.eps) == (Fraction(3, 7), Fraction(10, 13), -1)
    assert ratio_sq == Fraction(169, 49)


def test_explicit_matches_dynamic():
    rng = random.Random(51)
    for _ in range(20):
        p = sample_surface_point_1d(rng, bits=20)
        q_dyn, r_dyn = surface_first_return_1d(p)
        q_exp, r_exp = return_map_explicit_1d(p)
        assert q_dyn == q_exp
        assert r_dyn == r_exp


def test_explicit_map_boundary_raises():
    p = SurfacePoint1D(Fraction(1, 2), Fraction(1, 3), 1)
    with pytest.raises(NonGenericLatticeError):
        return_map_explicit_1d(p)


def test_first_return_needs_transversal():
    with pytest.raises(ValueError):
        first_return(LatticeBasis.identity(1, 1))


def test_sample_surface_point_deterministic():
    a = sample_surface_point_1d(random.Random(8), bits=30)
    b = sample_surface_point_1d(random.Random(8), bits=30)
    assert a == b


# ---------------------------------------------------------------------------
# return-time identity


def rho_at(basis):
    mem = surface_membership_S(basis)
    assert mem.member
    return float(ln_frac(mem.tall.height_sq / mem.wide.height_sq, 60)) / 2


def test_return_time_identity_1d():
    rng = random.Random(60)
    for _ in range(10):
        p = sample_surface_point_1d(rng, bits=24)
        basis = chart_lattice_1d(p)
        fr = first_return(basis)
        lhs = fr.tau * 2
        rhs = rho_at(fr.basis_after) + fr.rho_star
        assert lhs == pytest.approx(rhs, abs=1e-9)


def test_return_time_identity_2d():
    p = SurfacePoint2D(
        Fraction(-5, 16), Fraction(5, 8), Fraction(-7, 8), Fraction(-1, 2),
        Fraction(1, 8), Fraction(61, 16),
    )
    fr = first_return(chart_lattice_2d(p))
    assert fr.tau * 3 == pytest.approx(rho_at(fr.basis_after) + fr.rho_star, abs=1e-9)


def test_consecutive_returns_follow_visiting_times():
    _, basis = theta_basis(64, 61)
    chain = minimal_vectors(basis, 8)
    vt = visiting_times(chain)
    start = dict(vt.ratio_sq)[1]
    times = dict(vt.t)
    on_s = apply_flow_log(basis, start)
    fr = first_return(on_s)
    assert fr.tau == pytest.approx(times[2] - times[1], abs=1e-9)
    fr2 = first_return(fr.basis_after)
    assert fr2.tau == pytest.approx(times[3] - times[2], abs=1e-9)


# ---------------------------------------------------------------------------
# d = 2 chart


def test_chart_2d_frozen_membership():
    p = SurfacePoint2D(
        Fraction(-5, 16), Fraction(5, 8), Fraction(-7, 8), Fraction(-1, 2),
        Fraction(1, 8), Fraction(61, 16),
    )
    mem = surface_membership_S(chart_lattice_2d(p))
    assert mem.member
    assert mem.lam1_sq == 1
    assert mem.wide.y == (1, 0, 0)
    assert mem.wide.height_sq == Fraction(1, 64)
    assert mem.tall.y == (0, 1, 0)
    assert mem.tall.width_sq == Fraction(125, 256)


def test_chart_2d_first_return_frozen():
    p = SurfacePoint2D(
        Fraction(-5, 16), Fraction(5, 8), Fraction(-7, 8), Fraction(-1, 2),
        Fraction(1, 8), Fraction(61, 16),
    )
    fr = first_return(chart_lattice_2d(p))
    assert fr.ratio_sq == Fraction(3969, 125)
    assert fr.vector.y == (1, 0, 1)
    assert fr.tau == pytest.approx(0.5763259525801273, abs=1e-14)
    mem = surface_membership_S(fr.basis_after)
    assert mem.member
    assert mem.wide.y == (0, 1, 0)
    assert mem.tall.y == (1, 0, 1)


def test_chart_2d_off_transversal():
    p = SurfacePoint2D(
        Fraction(-5, 16), Fraction(5, 8), Fraction(-7, 8), Fraction(-1, 2),
        Fraction(1, 8), Fraction(1, 16),
    )
    basis = chart_lattice_2d(p)
    mem = surface_membership_S(basis)
    assert not mem.member
