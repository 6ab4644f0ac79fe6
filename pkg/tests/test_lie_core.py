from __future__ import annotations

import numpy as np
import pytest

from two_transport import lie_core as lc

BUILTIN_NAMES = ["U1", "SU2", "SO3", "U2", "R", "Z2", "Trivial"]


def test_identity_multiplication():
    g = lc.group("SU2")
    a = g.random(np.random.default_rng(0))
    assert lc.distance(lc.multiply(g.identity(), a), a) < 1e-14


def test_u1_phase_addition():
    g = lc.group("U1")
    a = g.element([[np.exp(1j * np.pi / 3)]])
    b = g.element([[np.exp(1j * np.pi / 6)]])
    c = lc.multiply(a, b)
    assert abs(c.matrix[0, 0] - np.exp(1j * np.pi / 2)) < 1e-14


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_associativity_and_inverse_100_random_pairs(name):
    g = lc.group(name)
    rng = np.random.default_rng(42)
    for _ in range(100):
        a, b, c = (g.random(rng) for _ in range(3))
        lhs = lc.multiply(lc.multiply(a, b), c)
        rhs = lc.multiply(a, lc.multiply(b, c))
        assert lc.distance(lhs, rhs) < 1e-12
        assert lc.distance(lc.multiply(lc.inverse(a), a), g.identity()) < 1e-12


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_exp_log_roundtrip(name):
    g = lc.group(name)
    rng = np.random.default_rng(7)
    for _ in range(25):
        a = g.random(rng, scale=0.6)
        try:
            x = lc.log(a)
        except lc.BranchCutError:
            assert g.kind == "cyclic"
            continue
        if x.norm() < 3.0:
            assert lc.distance(lc.exp(x), a) < 1e-9


def test_exp_of_zero_is_identity():
    g = lc.group("SO3")
    assert lc.distance(lc.exp(g.zero()), g.identity()) < 1e-15


def test_bracket_antisymmetry():
    g = lc.group("SU2")
    rng = np.random.default_rng(3)
    x = g.random_algebra(rng)
    assert lc.bracket(x, x).norm() < 1e-15
    y = g.random_algebra(rng)
    assert (lc.bracket(x, y) + lc.bracket(y, x)).norm() < 1e-14


def test_adjoint_matches_exp_ad_series():
    # Ad_{exp(xi)} = exp(ad_xi) summed to 12 terms
    g = lc.group("SU2")
    rng = np.random.default_rng(11)
    for _ in range(20):
        xi = g.random_algebra(rng, scale=0.25)  # keeps the 12-term tail below 1e-9
        eta = g.random_algebra(rng, scale=1.0)
        series = eta
        term = eta
        for k in range(1, 12):
            term = (1.0 / k) * lc.bracket(xi, term)
            series = series + term
        direct = lc.adjoint(lc.exp(xi), eta)
        assert (direct - series).norm() < 1e-9


def test_adjoint_is_algebra_homomorphism():
    g = lc.group("SU2")
    rng = np.random.default_rng(13)
    for _ in range(50):
        a = g.random(rng)
        x, y = g.random_algebra(rng), g.random_algebra(rng)
        lhs = lc.adjoint(a, lc.bracket(x, y))
        rhs = lc.bracket(lc.adjoint(a, x), lc.adjoint(a, y))
        assert (lhs - rhs).norm() < 1e-10


def test_distance_examples():
    g = lc.group("SU2")
    rng = np.random.default_rng(5)
    a = g.random(rng)
    assert lc.distance(a, a) == 0.0
    minus_e = g.element(-np.eye(2))
    assert abs(lc.distance(g.identity(), minus_e) - 2 * np.sqrt(2)) < 1e-14
    for _ in range(50):
        x, y, z = (g.random(rng) for _ in range(3))
        assert lc.distance(x, z) <= lc.distance(x, y) + lc.distance(y, z) + 1e-14


def test_group_mismatch_rejected():
    a = lc.group("SU2").random(np.random.default_rng(0))
    b = lc.group("U2").random(np.random.default_rng(0))
    with pytest.raises(lc.GroupMismatchError):
        lc.multiply(a, b)


def test_log_branch_cut_rejected():
    g = lc.group("U1")
    with pytest.raises(lc.BranchCutError):
        lc.log(g.element([[-1.0]]))


def test_membership_rejects_far_matrices():
    g = lc.group("SU2")
    with pytest.raises(lc.MembershipError):
        g.element(2.0 * np.eye(2))


def test_drift_reprojection():
    g = lc.group("U1")
    z = np.exp(0.4j) * (1.0 + 3e-9)  # drift below the hard error threshold
    a = g.element([[z]])
    assert abs(abs(a.matrix[0, 0]) - 1.0) < 1e-14


def test_su2_basis_brackets():
    g = lc.group("SU2")
    t1, t2, t3 = g.basis
    assert (lc.bracket(t1, t2) - t3).norm() < 1e-15
    assert (lc.bracket(t2, t3) - t1).norm() < 1e-15
    assert (lc.bracket(t3, t1) - t2).norm() < 1e-15


def test_discrete_groups_have_zero_algebra():
    for name in ("Z2", "Trivial"):
        g = lc.group(name)
        assert g.basis == []
        assert lc.distance(lc.exp(g.zero()), g.identity()) < 1e-15
