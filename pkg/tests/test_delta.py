import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bf_delta_sq, bf_perturbed, table_dict
from tailforge import (
    CoordinateSpace,
    DomainError,
    FunctionTable,
    PerturbationChoice,
    Side,
    delta_squared,
    herbst_mgf_check,
    log_sobolev_gap,
    maurer_eig_bounds,
    perturbed_values,
    tail_bound,
)
from tailforge.entropy import random_space, random_table


def as_dict(table):
    return table_dict([list(c.weights) for c in table.space.coordinates], table.flat.tolist())


# -- perturbed values -------------------------------------------------------

def test_perturbed_independent_of_coordinate(binary_square):
    Z = FunctionTable.from_function(binary_square, lambda a, b: 3.0 * b - 1)
    for choice in PerturbationChoice:
        assert np.array_equal(perturbed_values(Z, 0, choice).values, Z.values)


def test_perturbed_max_left_sup(max_table):
    Zk = perturbed_values(max_table, 0, PerturbationChoice.LEFT_SUP)
    assert Zk.flat.tolist() == [1.0, 1.0, 1.0, 1.0]


def test_perturbed_max_maurer_inf(max_table):
    Zk = perturbed_values(max_table, 0, "maurer")
    # value max(0, x2) = x2, listed row-major over (x1, x2)
    assert Zk.flat.tolist() == [0.0, 1.0, 0.0, 1.0]


def test_perturbed_matches_enumeration(rng):
    for _ in range(50):
        space = random_space(rng, 4, 4)
        Z = random_table(rng, space, -3, 3, positive=False)
        z = as_dict(Z)
        for k in range(space.n):
            for choice, use_max in ((PerturbationChoice.LEFT_SUP, True), (PerturbationChoice.MAURER_INF, False)):
                ref = bf_perturbed(space.shape, z, k, use_max)
                got = perturbed_values(Z, k, choice)
                assert got.flat.tolist() == [ref[idx] for idx in sorted(ref)]


def test_perturbed_is_constant_along_axis_and_idempotent(rng):
    for _ in range(30):
        Z = random_table(rng, random_space(rng, 4, 4), -1, 1, positive=False)
        for k in range(Z.space.n):
            for choice in PerturbationChoice:
                Zk = perturbed_values(Z, k, choice)
                first = np.take(Zk.values, [0], axis=k)
                assert np.all(Zk.values == first)
                assert np.array_equal(perturbed_values(Zk, k, choice).values, Zk.values)


def test_sign_invariants(rng):
    for _ in range(100):
        Z = random_table(rng, random_space(rng, 4, 4), -5, 5, positive=False)
        for k in range(Z.space.n):
            assert np.all(Z.values - perturbed_values(Z, k, "maurer").values >= 0)
            assert np.all(perturbed_values(Z, k, "left").values - Z.values >= 0)


def test_enlarging_candidates_is_monotone(rng):
    for _ in range(50):
        space = random_space(rng, 3, 3)
        k = int(rng.integers(space.n))
        old = space.coordinates[k]
        # one extra zero-weight candidate point on coordinate k
        bigger = CoordinateSpace(list(old.points) + ["extra"], list(old.weights) + [0.0])
        big_space = space.replace(k, bigger)
        Zbig = random_table(rng, big_space, -1, 1, positive=False)
        Zsmall = FunctionTable(space, np.take(Zbig.values, range(len(old)), axis=k))
        for choice, cmp in (("maurer", np.less_equal), ("left", np.greater_equal)):
            big = np.take(perturbed_values(Zbig, k, choice).values, range(len(old)), axis=k)
            small = perturbed_values(Zsmall, k, choice).values
            assert np.all(cmp(big, small))
        dl_big = delta_squared(Zbig, "left").delta_sq.values
        dl_small = delta_squared(Zsmall, "left").delta_sq.values
        assert np.all(np.take(dl_big, range(len(old)), axis=k) >= dl_small - 1e-15)


# -- delta squared ----------------------------------------------------------

def test_delta_constant(binary_square):
    Z = FunctionTable(binary_square, np.full(4, -2.0))
    for choice in PerturbationChoice:
        rep = delta_squared(Z, choice)
        assert rep.sup_norm == 0.0
        assert np.all(rep.delta_sq.values == 0)


def test_asymmetry_witness(max_table):
    rm = delta_squared(max_table, "maurer")
    rl = delta_squared(max_table, "left")
    assert rm.sup_norm == 1.0
    assert rl.sup_norm == 2.0
    assert rm.delta_sq.flat.tolist() == [0.0, 1.0, 1.0, 0.0]
    assert rl.delta_sq.flat.tolist() == [2.0, 0.0, 0.0, 0.0]


def test_delta_matches_enumeration(rng):
    for _ in range(50):
        Z = random_table(rng, random_space(rng, 4, 4), -2, 2, positive=False)
        z = as_dict(Z)
        for choice, use_max in (("left", True), ("maurer", False)):
            ref = bf_delta_sq(Z.space.shape, z, use_max)
            rep = delta_squared(Z, choice)
            np.testing.assert_allclose(rep.delta_sq.flat, [ref[i] for i in sorted(ref)], rtol=0, atol=1e-14)
            assert rep.sup_norm == rep.delta_sq.values.max()


def test_delta_report_json(max_table):
    obj = delta_squared(max_table, "left").to_json()
    assert obj == {"choice": "left", "sup_norm": 2.0, "delta_sq": [2.0, 0.0, 0.0, 0.0]}


def test_consistency_with_entropy_core(rng):
    lams = {"left": [-2.0, -1.0, -0.5, -0.1], "maurer": [0.1, 0.5, 1.0, 2.0]}
    for _ in range(60):
        space = random_space(rng, 4, 4)
        assert space.size <= 256
        Z = random_table(rng, space, -1, 1, positive=False)
        for choice, grid in lams.items():
            rep = delta_squared(Z, choice)
            for lam in grid:
                assert log_sobolev_gap(Z, lam, rep.perturbed) >= -1e-10
                assert herbst_mgf_check(Z, lam, rep.sup_norm, choice).holds(1e-10)


# -- tail bounds ------------------------------------------------------------

def test_tail_bound_values():
    assert tail_bound(0.0, 3.0) == 1.0
    assert tail_bound(2.0, 2.0) == pytest.approx(math.exp(-1), rel=1e-15)
    # sup-norm n^2/N with n = 4, N = 16 is 1
    assert tail_bound(1.0, 4**2 / 16, Side.LEFT) == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert tail_bound(1.0, 1.0, "right") == pytest.approx(0.6065306597126334, rel=1e-15)


def test_tail_bound_degenerate():
    assert tail_bound(0.0, 0.0) == 1.0
    assert tail_bound(1e-9, 0.0) == 0.0
    assert tail_bound(5.0, math.inf) == 1.0


def test_tail_bound_rejects_negative_t():
    with pytest.raises(DomainError):
        tail_bound(-0.1, 1.0)
    with pytest.raises(ValueError):
        tail_bound(1.0, 1.0, "sideways")


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 50), st.floats(0, 50), st.floats(1e-3, 100))
def test_tail_bound_monotone(t1, t2, s):
    lo, hi = sorted((t1, t2))
    assert tail_bound(hi, s) <= tail_bound(lo, s)
    assert tail_bound(lo, s) <= tail_bound(lo, 2 * s)


def test_maurer_bounds():
    assert maurer_eig_bounds(1, 0.0) == (1.0, 1.0)
    r, l = maurer_eig_bounds(1, 4.0)
    assert r == pytest.approx(math.exp(-1), rel=1e-15)
    assert l == pytest.approx(math.exp(-2 / 3), rel=1e-15)
    r, l = maurer_eig_bounds(2, 8.0)
    assert r == pytest.approx(math.exp(-1), rel=1e-15)
    assert l == pytest.approx(math.exp(-2 / 3), rel=1e-15)


@pytest.mark.parametrize("k", [1, 2, 5])
def test_maurer_left_exceeds_right(k):
    for t in np.linspace(0.1, 40, 50):
        right, left = maurer_eig_bounds(k, t)
        assert left > right


def test_maurer_rejects_bad_args():
    with pytest.raises(DomainError):
        maurer_eig_bounds(0, 1.0)
    with pytest.raises(DomainError):
        maurer_eig_bounds(1, -1.0)


def test_choice_parsing():
    assert PerturbationChoice.parse("maurer") is PerturbationChoice.MAURER_INF
    assert PerturbationChoice.parse("LEFT") is PerturbationChoice.LEFT_SUP
    with pytest.raises(ValueError):
        PerturbationChoice.parse("median")
