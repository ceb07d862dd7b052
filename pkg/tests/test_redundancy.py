import math

import numpy as np
import pytest

from gidkit import (
    Antichain,
    DistributionError,
    JointTable,
    build_lattice,
    entropy,
    expected_ped,
    gate,
    local_ped,
    local_surprisal,
)
from gidkit.redundancy import H_MIN, RedundancyFunction

ATOL = 1e-9

BOTTOM3 = "{X1}{X2}{T}"
MIDDLE3 = "{X1,X2}{X1,T}{X2,T}"
TOP3 = "{X1,X2,T}"


def table_values(table):
    names = table.display_names()
    from gidkit import format_atom

    return {format_atom(a, names): v for a, v in table.items()}


# -- h_min ----------------------------------------------------------------------


def test_h_min_xor_singletons(xor):
    alpha = Antichain.of(3, (0,), (1,), (2,))
    assert H_MIN.evaluate(xor, alpha, (0, 0, 0)) == pytest.approx(1.0)


def test_h_min_xor_pairs(xor):
    alpha = Antichain.of(3, (0, 1), (0, 2), (1, 2))
    assert H_MIN.evaluate(xor, alpha, (0, 0, 0)) == pytest.approx(2.0)


def test_h_min_singleton_antichain_is_surprisal(xor):
    alpha = Antichain.of(3, (0, 2))
    for state in xor.states():
        assert H_MIN.evaluate(xor, alpha, state) == pytest.approx(
            local_surprisal(xor, [0, 2], state)
        )


def test_h_min_zero_probability_source_errors(xor):
    alpha = Antichain.of(3, (0, 1, 2))
    with pytest.raises(DistributionError):
        H_MIN.evaluate(xor, alpha, (0, 0, 1))


# -- local decomposition -----------------------------------------------------------


def test_local_ped_uniform_three_bits(uniform8):
    values = table_values(local_ped(uniform8, (0, 1, 1)))
    for atom, v in values.items():
        expected = 1.0 if atom in (BOTTOM3, MIDDLE3, TOP3) else 0.0
        assert v == pytest.approx(expected, abs=ATOL), atom


def test_local_ped_xor(xor):
    for state in xor.states():
        values = table_values(local_ped(xor, state))
        for atom, v in values.items():
            expected = 1.0 if atom in (BOTTOM3, MIDDLE3) else 0.0
            assert v == pytest.approx(expected, abs=ATOL), atom


def test_local_ped_deterministic_table_is_zero():
    point = JointTable(["A", "B", "C"], [2, 2, 2], {(1, 0, 1): 1.0})
    assert np.allclose(local_ped(point, (1, 0, 1)).values, 0.0)


def test_local_ped_outside_support_errors(xor):
    with pytest.raises(DistributionError):
        local_ped(xor, (0, 0, 1))


def test_local_ped_reconstitutes_surprisal(xor):
    for state in xor.states():
        total = local_ped(xor, state).total()
        assert total == pytest.approx(-math.log2(xor.prob(state)), abs=ATOL)


# -- expected decomposition -----------------------------------------------------------


def test_expected_ped_table1_columns(xor, uniform8):
    hq = table_values(expected_ped(uniform8))
    hp = table_values(expected_ped(xor))
    for atom in hq:
        assert hq[atom] == pytest.approx(
            1.0 if atom in (BOTTOM3, MIDDLE3, TOP3) else 0.0, abs=ATOL
        )
        assert hp[atom] == pytest.approx(
            1.0 if atom in (BOTTOM3, MIDDLE3) else 0.0, abs=ATOL
        )


def test_expected_ped_independent_pair():
    pair = JointTable(["X1", "X2"], [2, 2], {(a, b): 0.25 for a in (0, 1) for b in (0, 1)})
    values = {str(a): v for a, v in expected_ped(pair).items()}
    assert values["{X1}{X2}"] == pytest.approx(1.0, abs=ATOL)
    assert values["{X1}"] == pytest.approx(0.0, abs=ATOL)
    assert values["{X2}"] == pytest.approx(0.0, abs=ATOL)
    assert values["{X1,X2}"] == pytest.approx(1.0, abs=ATOL)


def test_expected_ped_single_coin():
    coin = JointTable(["X1"], [2], {(0,): 0.5, (1,): 0.5})
    table = expected_ped(coin)
    assert len(table) == 1
    assert table.total() == pytest.approx(1.0, abs=ATOL)


def test_expected_ped_sums_to_entropy_on_random_tables():
    for n in (2, 3):
        for seed in range(50):
            d = gate("random", n=n, seed=seed)
            assert expected_ped(d).total() == pytest.approx(entropy(d), abs=ATOL)


def test_expected_ped_jobs_do_not_change_values():
    d = gate("random", n=3, seed=123)
    lone = expected_ped(d, jobs=1)
    pooled = expected_ped(d, jobs=4)
    assert lone.values.tolist() == pooled.values.tolist()


# -- structural properties ---------------------------------------------------------------


def test_marginal_consistency_two_variables():
    # the two atoms at or below a singleton recompose that variable's surprisal
    for seed in range(25):
        d = gate("random", n=2, seed=seed)
        for state in d.states():
            values = {str(a): v for a, v in local_ped(d, state).items()}
            h1 = local_surprisal(d, [0], state)
            h2 = local_surprisal(d, [1], state)
            assert values["{X1}{X2}"] + values["{X1}"] == pytest.approx(h1, abs=ATOL)
            assert values["{X1}{X2}"] + values["{X2}"] == pytest.approx(h2, abs=ATOL)


def test_h_min_local_atoms_non_negative_on_random_suite():
    checked = 0
    for n in (2, 3):
        for seed in range(500):
            d = gate("random", n=n, seed=seed)
            lattice = build_lattice(n)
            states = d.states()
            partials = lattice.invert_matrix(H_MIN.cumulative_matrix(d, lattice, states))
            assert partials.min() >= -ATOL
            checked += 1
    assert checked == 1000


def test_h_min_cumulative_monotone_along_order(xor):
    lattice = build_lattice(3)
    dists = [xor] + [gate("random", n=3, seed=s) for s in range(5)]
    for d in dists:
        states = d.states()
        cumulative = H_MIN.cumulative_matrix(d, lattice, states)
        for i, alpha in enumerate(lattice.atoms):
            for j in lattice.down_sets[i].tolist():
                assert (cumulative[j] <= cumulative[i] + ATOL).all(), (
                    f"{lattice.atoms[j]} below {alpha} but larger"
                )


# -- pluggable interface --------------------------------------------------------------------


class SlowMin(RedundancyFunction):
    """Same definition as h_min, but through the generic per-atom path."""

    name = "slow_min"

    def evaluate(self, dist, alpha, state):
        return min(local_surprisal(dist, src, state) for src in alpha.sources)


def test_generic_fallback_matches_vectorized_path():
    d = gate("random", n=3, seed=9)
    fast = expected_ped(d, fn=H_MIN)
    slow = expected_ped(d, fn=SlowMin())
    np.testing.assert_allclose(fast.values, slow.values, atol=1e-12)
