"""Pointwise redundant entropy and the partial entropy decomposition (PED).

A redundancy function assigns each antichain a local (per-state) cumulative
value; Möbius inversion over the lattice then splits the local surprisal of a
state into exclusive per-atom contributions, and averaging those over the
support yields the expected decomposition of the Shannon entropy.

Only ``h_min`` ships: the minimum, over an antichain's sources, of the local
source surprisal. The interface is pluggable so other localizable redundancy
functions can slot in without touching the engine.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .distributions import (
    DistributionError,
    JointTable,
    State,
    entropy,
    local_surprisal,
)
from .lattice import Antichain, AtomTable, RedundancyLattice, build_lattice


class RedundancyFunction:
    """Pointwise (localizable) redundant-entropy function over antichains."""

    name: str = "abstract"

    def evaluate(self, dist: JointTable, alpha: Antichain, state: Sequence[int]) -> float:
        raise NotImplementedError

    def cumulative_matrix(
        self, dist: JointTable, lattice: RedundancyLattice, states: Sequence[State]
    ) -> np.ndarray:
        """Cumulative values for every (atom, state); subclasses may vectorize."""
        out = np.empty((len(lattice.atoms), len(states)), dtype=np.float64)
        for i, alpha in enumerate(lattice.atoms):
            for j, state in enumerate(states):
                out[i, j] = self.evaluate(dist, alpha, state)
        return out


class MinSourceSurprisal(RedundancyFunction):
    """h_min: the least surprising single source of the antichain, per state."""

    name = "h_min"

    def evaluate(self, dist: JointTable, alpha: Antichain, state: Sequence[int]) -> float:
        return min(local_surprisal(dist, src, state) for src in alpha.sources)

    def cumulative_matrix(
        self, dist: JointTable, lattice: RedundancyLattice, states: Sequence[State]
    ) -> np.ndarray:
        rows = _source_surprisal_rows(dist, lattice, states)
        out = np.empty((len(lattice.atoms), len(states)), dtype=np.float64)
        for i, src_ids in enumerate(lattice.atom_source_ids):
            out[i] = rows[src_ids].min(axis=0)
        return out


H_MIN = MinSourceSurprisal()

REDUNDANCY_FUNCTIONS: dict[str, RedundancyFunction] = {H_MIN.name: H_MIN}


def _source_surprisal_rows(
    dist: JointTable, lattice: RedundancyLattice, states: Sequence[State]
) -> np.ndarray:
    """-log2 marginal probability of every lattice source at every state."""
    rows = np.empty((len(lattice.sources), len(states)), dtype=np.float64)
    for k, src in enumerate(lattice.sources):
        marg = dist.marginal_probs(src.indices)
        for j, state in enumerate(states):
            p = marg.get(tuple(state[i] for i in src.indices), 0.0)
            if p <= 0.0:
                raise DistributionError(
                    f"state {tuple(state)} projects onto source {src.indices} with "
                    "probability zero; surprisal is infinite"
                )
            rows[k, j] = p
    return -np.log2(rows)


def _lattice_for(dist: JointTable) -> RedundancyLattice:
    return build_lattice(dist.n)


def local_partials_matrix(
    dist: JointTable,
    lattice: RedundancyLattice,
    states: Sequence[State],
    fn: RedundancyFunction = H_MIN,
    jobs: int = 1,
) -> np.ndarray:
    """Per-state partial atom vectors, as an (atoms, states) matrix.

    With jobs > 1 the state batch is split into chunks evaluated on a thread
    pool; results are reassembled in state order, so the output is identical
    for every parallelism degree.
    """
    if not states:
        return np.empty((len(lattice.atoms), 0), dtype=np.float64)
    if jobs <= 1 or len(states) < 2 * jobs:
        return lattice.invert_matrix(fn.cumulative_matrix(dist, lattice, states))
    bounds = np.linspace(0, len(states), jobs + 1, dtype=int)
    chunks = [states[a:b] for a, b in zip(bounds[:-1], bounds[1:]) if a < b]
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(
            pool.map(
                lambda chunk: lattice.invert_matrix(fn.cumulative_matrix(dist, lattice, chunk)),
                chunks,
            )
        )
    return np.hstack(parts)


def local_ped(
    dist: JointTable, state: Sequence[int], fn: RedundancyFunction = H_MIN
) -> AtomTable:
    """Decompose the local surprisal of one support state into lattice atoms.

    The atom values sum to -log2 P(state).
    """
    state = tuple(int(x) for x in state)
    if dist.prob(state) <= 0.0:
        raise DistributionError(f"state {state} is outside the support")
    lattice = _lattice_for(dist)
    partials = local_partials_matrix(dist, lattice, [state], fn)[:, 0]
    return AtomTable(lattice, partials, names=dist.variable_names)


def expected_ped(
    dist: JointTable, fn: RedundancyFunction = H_MIN, jobs: int = 1
) -> AtomTable:
    """Support-weighted expectation of the local decomposition.

    The atom values sum to the Shannon entropy of the table.
    """
    lattice = _lattice_for(dist)
    states = dist.states()
    partials = local_partials_matrix(dist, lattice, states, fn, jobs=jobs)
    weights = [dist.prob(s) for s in states]
    expected = _expectation_rows(partials, weights)
    return AtomTable(lattice, expected, names=dist.variable_names)


def _expectation_rows(matrix: np.ndarray, weights: Sequence[float]) -> np.ndarray:
    # fsum gives the correctly-rounded dot product, so expectations do not
    # depend on chunking or summation order
    return np.array(
        [math.fsum(w * v for w, v in zip(weights, row.tolist())) for row in matrix],
        dtype=np.float64,
    )


__all__ = [
    "RedundancyFunction",
    "MinSourceSurprisal",
    "H_MIN",
    "REDUNDANCY_FUNCTIONS",
    "local_ped",
    "expected_ped",
    "local_partials_matrix",
    "entropy",
]
