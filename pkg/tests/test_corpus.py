import pytest

from gidkit import DistributionError, GateSpec, gate, make_gate


def test_xor_table():
    xor = gate("xor")
    assert xor.variable_names == ("X1", "X2", "T")
    assert xor.states() == ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0))
    assert all(p == pytest.approx(0.25) for _, p in xor.items())


def test_and_or_tables():
    a = gate("and")
    assert a.states() == ((0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 1))
    o = gate("or")
    assert o.states() == ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1))


def test_parity2_is_xor():
    xor = gate("xor")
    parity = gate("parity", n=2)
    assert parity.variable_names == xor.variable_names
    assert parity.states() == xor.states()
    for s, p in xor.items():
        assert parity.prob(s) == pytest.approx(p)


def test_parity3_states_have_even_weight():
    parity = gate("parity", n=3)
    assert parity.n == 4
    assert len(parity) == 8
    for s, p in parity.items():
        assert sum(s) % 2 == 0
        assert p == pytest.approx(0.125)


def test_uniform():
    u = gate("uniform", n=3)
    assert len(u) == 8
    assert all(p == pytest.approx(0.125) for _, p in u.items())


def test_copy():
    c = gate("copy", n=3)
    assert c.states() == ((0, 0, 0), (1, 1, 1))
    with pytest.raises(DistributionError):
        gate("copy", n=1)


def test_random_is_reproducible_and_positive():
    a = gate("random", n=3, seed=11)
    b = gate("random", n=3, seed=11)
    assert a.states() == b.states()
    assert [p for _, p in a.items()] == [p for _, p in b.items()]
    assert len(a) == 8  # strictly positive everywhere
    assert min(p for _, p in a.items()) > 0
    c = gate("random", n=3, seed=12)
    assert [p for _, p in a.items()] != [p for _, p in c.items()]


def test_random_needs_seed():
    with pytest.raises(DistributionError):
        gate("random", n=3)


def test_gate_name_case_insensitive():
    assert make_gate(GateSpec("xOr")).name == "xor"
    with pytest.raises(DistributionError):
        GateSpec("NAND")
