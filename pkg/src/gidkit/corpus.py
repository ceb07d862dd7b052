"""Canonical distributions for tests and demos: logic gates, copies, parity,
uniform tables, and seeded random full-support tables."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import DistributionError, JointTable

GATE_NAMES = ("XOR", "AND", "OR", "COPY", "PARITY", "UNIFORM", "RANDOM")

# random tables mix a seeded flat Dirichlet with this uniform floor so every
# structural state stays strictly positive
_RANDOM_FLOOR = 1e-6


@dataclass(frozen=True)
class GateSpec:
    name: str
    n: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "name", self.name.upper())
        if self.name not in GATE_NAMES:
            raise DistributionError(
                f"unknown gate {self.name!r}; expected one of {GATE_NAMES}"
            )


def _binary_gate(label: str, op) -> JointTable:
    entries = {(a, b, op(a, b)): 0.25 for a in (0, 1) for b in (0, 1)}
    return JointTable(["X1", "X2", "T"], [2, 2, 2], entries, name=label)


def make_gate(spec: GateSpec) -> JointTable:
    """Build the distribution a :class:`GateSpec` names.

    XOR / AND / OR put equiprobable independent bits on the inputs and append
    the deterministic output. PARITY(n) appends the parity of n equiprobable
    input bits (PARITY(2) is XOR). COPY(n) is one fair bit copied n times.
    UNIFORM(n) is flat on n bits. RANDOM(n, seed) is a seeded strictly positive
    table on n bits, reproducible bit-for-bit per seed.
    """
    name, n, seed = spec.name, spec.n, spec.seed
    if name == "XOR":
        return _binary_gate("xor", lambda a, b: a ^ b)
    if name == "AND":
        return _binary_gate("and", lambda a, b: a & b)
    if name == "OR":
        return _binary_gate("or", lambda a, b: a | b)
    if name == "COPY":
        n = 2 if n is None else n
        if n < 2:
            raise DistributionError(f"COPY needs n >= 2, got {n}")
        entries = {tuple([v] * n): 0.5 for v in (0, 1)}
        return JointTable([f"X{i+1}" for i in range(n)], [2] * n, entries, name=f"copy{n}")
    if name == "PARITY":
        n = 2 if n is None else n
        if n < 2:
            raise DistributionError(f"PARITY needs n >= 2 input bits, got {n}")
        p = 0.5**n
        entries = {}
        for bits in np.ndindex(*(2,) * n):
            state = tuple(int(b) for b in bits) + (int(sum(bits)) % 2,)
            entries[state] = p
        names = [f"X{i+1}" for i in range(n)] + ["T"]
        return JointTable(names, [2] * (n + 1), entries, name=f"parity{n}")
    if name == "UNIFORM":
        n = 3 if n is None else n
        if n < 1:
            raise DistributionError(f"UNIFORM needs n >= 1, got {n}")
        p = 0.5**n
        entries = {tuple(int(b) for b in bits): p for bits in np.ndindex(*(2,) * n)}
        return JointTable([f"X{i+1}" for i in range(n)], [2] * n, entries, name=f"uniform{n}")
    # RANDOM
    n = 3 if n is None else n
    if n < 1:
        raise DistributionError(f"RANDOM needs n >= 1, got {n}")
    if seed is None:
        raise DistributionError("RANDOM needs a seed for reproducibility")
    size = 2**n
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(size)) * (1.0 - size * _RANDOM_FLOOR) + _RANDOM_FLOOR
    entries = {
        tuple(int(b) for b in bits): float(p)
        for bits, p in zip(np.ndindex(*(2,) * n), probs)
    }
    return JointTable(
        [f"X{i+1}" for i in range(n)], [2] * n, entries, name=f"random{n}-{seed}"
    )


def gate(name: str, n: int | None = None, seed: int | None = None) -> JointTable:
    return make_gate(GateSpec(name, n=n, seed=seed))
