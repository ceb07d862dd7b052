"""Acceptance gate: every criterion at its stated tolerance, one line each.

Run with `pytest tests/test_acceptance.py -v -s`; add `--runslow` for the
n=5 lattice count.
"""
import math
import subprocess
import sys
import time

import pytest

from gidkit import (
    build_lattice,
    entropy,
    expected_ped,
    gate,
    kl_divergence,
    o_information,
    o_information_atoms,
    partial_kl,
    pid_conditional,
    pid_joint,
    product_of_marginals,
    save_table,
    tc_decomposition,
    tse,
    tse_atoms,
)
from gidkit.lattice import format_atom
from gidkit.redundancy import H_MIN
from gidkit.measures import _mutual_information

from .oracles import extension_antichain_count, naive_antichain_count
from .test_divergence import (
    NEGATIVE_FIXTURE,
    NEGATIVE_FIXTURE_SEEDS,
    NEGATIVE_FIXTURE_TOTAL,
)

TOL = 1e-9

BOTTOM3 = "{X1}{X2}{T}"
MIDDLE3 = "{X1,X2}{X1,T}{X2,T}"
TOP3 = "{X1,X2,T}"


def atom_map(table_or_report, names):
    if hasattr(table_or_report, "rows"):
        return {format_atom(r.atom, names): r.value_bits for r in table_or_report.rows}
    return {format_atom(a, names): v for a, v in table_or_report.items()}


def check(label, condition):
    status = "PASS" if condition else "FAIL"
    print(f"[{status}] {label}")
    assert condition, label


def random_suite():
    """The seeded 500-table suite shared by the reconstitution and
    non-negativity criteria: 250 tables each for 2 and 3 variables."""
    for n in (2, 3):
        for seed in range(250):
            yield gate("random", n=n, seed=seed)


def test_table_1_golden():
    xor = gate("xor")
    uniform = product_of_marginals(xor)
    start = time.perf_counter()
    hq = expected_ped(uniform)
    hp = expected_ped(xor)
    tc = tc_decomposition(xor)
    elapsed = time.perf_counter() - start

    names = xor.variable_names
    hq_map, hp_map, tc_map = (atom_map(x, names) for x in (hq, hp, tc))
    ok = True
    for atom in hq_map:
        ok &= math.isclose(hq_map[atom], 1.0 if atom in (BOTTOM3, MIDDLE3, TOP3) else 0.0, abs_tol=TOL)
        ok &= math.isclose(hp_map[atom], 1.0 if atom in (BOTTOM3, MIDDLE3) else 0.0, abs_tol=TOL)
        ok &= math.isclose(tc_map[atom], 1.0 if atom == TOP3 else 0.0, abs_tol=TOL)
    ok &= elapsed < 1.0
    check(f"golden decomposition table (runtime {elapsed * 1000:.0f} ms)", ok)


def test_lattice_counts_small_n():
    known = {1: 1, 2: 4, 3: 18, 4: 166}
    start = time.perf_counter()
    built = {n: len(build_lattice(n)) for n in range(1, 5)}
    elapsed = time.perf_counter() - start
    oracle = {n: naive_antichain_count(n) for n in range(1, 5)}
    check(
        f"lattice counts n=1..4 vs brute-force oracle (build {elapsed * 1000:.0f} ms)",
        built == known == oracle and elapsed < 1.0,
    )


@pytest.mark.slow
def test_lattice_count_n5():
    start = time.perf_counter()
    count = len(build_lattice(5))
    elapsed = time.perf_counter() - start
    check(
        f"lattice count n=5 (build {elapsed:.1f} s)",
        count == 7579 == extension_antichain_count(5) and elapsed < 60.0,
    )


def test_reconstitution_suite():
    lattices = {n: build_lattice(n) for n in (2, 3)}
    count = 0
    ok = True
    for dist in random_suite():
        lattice = lattices[dist.n]
        states = dist.states()
        partials = lattice.invert_matrix(H_MIN.cumulative_matrix(dist, lattice, states))
        for j, state in enumerate(states):
            ok &= math.isclose(
                math.fsum(partials[:, j].tolist()), -math.log2(dist.prob(state)), abs_tol=TOL
            )
        ok &= math.isclose(expected_ped(dist).total(), entropy(dist), abs_tol=TOL)
        count += 1
    check(f"reconstitution on {count} seeded random tables", ok and count == 500)


def test_gid_completeness():
    ok = True
    for seed in range(200):
        post = gate("random", n=3, seed=seed)
        prior = gate("random", n=3, seed=30_000 + seed)
        result = partial_kl(post, prior)
        ok &= math.isclose(result.atoms.total(), kl_divergence(post, prior), abs_tol=TOL)
    check("partial KL sums to the direct divergence on 200 seeded pairs", ok)


def test_gid_negative_atom_fixture():
    post = gate("random", n=3, seed=NEGATIVE_FIXTURE_SEEDS[0])
    prior = gate("random", n=3, seed=NEGATIVE_FIXTURE_SEEDS[1])
    result = partial_kl(post, prior)
    values = atom_map(result.atoms, post.variable_names)
    ok = all(math.isclose(values[a], v, abs_tol=TOL) for a, v in NEGATIVE_FIXTURE.items())
    ok &= min(values.values()) < 0
    ok &= math.isclose(result.total_bits, NEGATIVE_FIXTURE_TOTAL, abs_tol=TOL)
    ok &= result.total_bits >= -TOL
    check("frozen fixture with a negative atom and non-negative total", ok)


def test_h_min_non_negativity():
    lattices = {n: build_lattice(n) for n in (2, 3)}
    worst = 0.0
    for dist in random_suite():
        lattice = lattices[dist.n]
        partials = lattice.invert_matrix(
            H_MIN.cumulative_matrix(dist, lattice, dist.states())
        )
        worst = min(worst, float(partials.min()))
    check(f"local atoms non-negative across the random suite (min {worst:.2e})", worst >= -TOL)


def test_o_information_identity():
    ok = True
    for seed in range(200):
        d = gate("random", n=3, seed=seed)
        ok &= math.isclose(o_information_atoms(d).scalar_bits, o_information(d), abs_tol=TOL)
    ok &= math.isclose(o_information(gate("xor")), -1.0, abs_tol=TOL)
    ok &= math.isclose(o_information(gate("copy", n=3)), 1.0, abs_tol=TOL)
    check("atom-form O-information equals the direct form on 200 tables", ok)


def test_tse_identity():
    ok = True
    for seed in range(200):
        d = gate("random", n=3, seed=seed)
        ok &= math.isclose(tse_atoms(d).scalar_bits, tse(d), abs_tol=TOL)
    ok &= math.isclose(tse(gate("xor")), 1.0, abs_tol=TOL)
    check("atom-form TSE equals the direct form on 200 tables", ok)


def _pair_mi(d, i, t):
    from gidkit import marginalize

    joint = marginalize(d, sorted([i, t]))
    return (
        entropy(marginalize(d, [i])) + entropy(marginalize(d, [t])) - entropy(joint)
    )


def test_pid_recovery():
    xor = gate("xor")
    report = pid_conditional(xor, "T")
    values = [r.value_bits for r in report.rows]
    ok = all(
        math.isclose(v, e, abs_tol=TOL) for v, e in zip(values, [0.0, 0.0, 0.0, 1.0])
    )
    for seed in range(200):
        d = gate("random", n=3, seed=seed)
        rep = pid_conditional(d, "X3")
        red, u1, u2, syn = [r.value_bits for r in rep.rows]
        mi = _mutual_information(d, [0, 1], 2)
        ok &= math.isclose(red + u1 + u2 + syn, mi, abs_tol=TOL)
        ok &= math.isclose(red + u1, _pair_mi(d, 0, 2), abs_tol=TOL)
        ok &= math.isclose(red + u2, _pair_mi(d, 1, 2), abs_tol=TOL)
        joint = pid_joint(d, "X3")
        ok &= math.isclose(joint.scalar_bits, mi, abs_tol=TOL)
    check("single-target recovery: gate values plus marginal identities on 200 tables", ok)


def test_cli_determinism(tmp_path):
    path = tmp_path / "xor.json"
    save_table(gate("xor"), path)
    ok = True
    for args in (["ped", str(path)], ["tc", str(path), "--format", "json"]):
        runs = [
            subprocess.run(
                [sys.executable, "-m", "gidkit", *args], capture_output=True
            )
            for _ in range(2)
        ]
        ok &= runs[0].returncode == runs[1].returncode == 0
        ok &= runs[0].stdout == runs[1].stdout
    check("identical CLI invocations are byte-identical", ok)
