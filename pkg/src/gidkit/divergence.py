"""Atom-wise decomposition of the information gained in a belief update.

The KL divergence from a prior to a posterior is the posterior-expected
difference of local surprisals under the two tables. Decomposing both local
surprisals over the lattice and subtracting atom-by-atom splits that
information gain into one value per antichain. Individual atoms may be
negative (information about that combination of parts was *lost* in the
update); the atoms always sum to the non-negative scalar divergence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import (
    DEFAULT_JITTER_EPS,
    DistributionError,
    JointTable,
    SupportViolationError,
    apply_support_policy,
    support_check,
)
from .lattice import AtomTable, build_lattice
from .redundancy import H_MIN, RedundancyFunction, local_partials_matrix

SUM_TOL = 1e-9
JITTER_SUM_TOL = 1e-6  # jitter perturbs the prior, so the identity is held looser


def kl_divergence(posterior: JointTable, prior: JointTable) -> float:
    """Information gained updating from `prior` to `posterior`, in bits.

    Defined only when every posterior-support state has positive prior
    probability; violations raise rather than returning infinity.
    """
    violations = support_check(posterior, prior)
    if violations:
        raise SupportViolationError(violations)
    return math.fsum(
        p * (math.log2(p) - math.log2(prior.prob(s))) for s, p in posterior.items()
    )


def cross_entropy(posterior: JointTable, prior: JointTable) -> float:
    """Posterior-expected surprisal under the prior's table, in bits."""
    violations = support_check(posterior, prior)
    if violations:
        raise SupportViolationError(violations)
    return -math.fsum(p * math.log2(prior.prob(s)) for s, p in posterior.items())


@dataclass(frozen=True)
class GidResult:
    """A full decomposition of one belief update."""

    posterior_id: str
    prior_id: str
    policy: str
    atoms: AtomTable
    total_bits: float  # scalar KL divergence, computed directly

    def __post_init__(self) -> None:
        tol = JITTER_SUM_TOL if self.policy == "jitter" else SUM_TOL
        gap = abs(self.atoms.total() - self.total_bits)
        if gap > tol:
            raise AssertionError(
                f"atom sum differs from the scalar divergence by {gap:.3e} bits (tol {tol:g})"
            )
        if self.total_bits < -SUM_TOL:
            raise AssertionError(f"negative total divergence: {self.total_bits!r}")


def partial_kl(
    posterior: JointTable,
    prior: JointTable,
    fn: RedundancyFunction = H_MIN,
    policy: str = "error",
    jitter_eps: float = DEFAULT_JITTER_EPS,
    jobs: int = 1,
) -> GidResult:
    """Decompose the prior-to-posterior information gain over the lattice.

    For each atom, the posterior-weighted average (over the posterior's
    support) of the difference between the prior-side and posterior-side local
    partial entropy values. Atom values sum to ``kl_divergence(posterior,
    prior)`` after the support policy has been applied.
    """
    if not posterior.same_shape(prior):
        raise DistributionError(
            "posterior and prior must share variable names and cardinalities"
        )
    posterior, prior = apply_support_policy(posterior, prior, policy, jitter_eps)

    lattice = build_lattice(posterior.n)
    states = posterior.states()
    post_partials = local_partials_matrix(posterior, lattice, states, fn, jobs=jobs)
    prior_partials = local_partials_matrix(prior, lattice, states, fn, jobs=jobs)
    weights = [posterior.prob(s) for s in states]
    diffs = prior_partials - post_partials
    atom_values = np.array(
        [math.fsum(w * v for w, v in zip(weights, row.tolist())) for row in diffs],
        dtype=np.float64,
    )
    return GidResult(
        posterior_id=posterior.label(),
        prior_id=prior.label(),
        policy=policy,
        atoms=AtomTable(lattice, atom_values, names=posterior.variable_names),
        total_bits=kl_divergence(posterior, prior),
    )
