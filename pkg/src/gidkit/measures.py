"""Derived decompositions: total correlation, cross entropy, negentropy,
O-information, TSE complexity, and the two single-target recoveries.

Every report carries both the atom-level decomposition and an independently
computed scalar cross-check; construction fails if the two disagree.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .distributions import (
    DEFAULT_JITTER_EPS,
    DistributionError,
    JointTable,
    apply_support_policy,
    condition,
    entropy,
    marginalize,
    product_of_marginals,
    support_check,
)
from .divergence import GidResult, cross_entropy, kl_divergence, partial_kl
from .lattice import Antichain, AtomTable, build_lattice
from .redundancy import H_MIN, RedundancyFunction, local_partials_matrix

CHECK_TOL = 1e-9
JITTER_CHECK_TOL = 1e-6


@dataclass(frozen=True)
class AtomRow:
    atom: Antichain
    value_bits: float
    coefficient: Fraction | None = None


@dataclass(frozen=True)
class MeasureReport:
    """Scalar measure plus its atom-level breakdown and an independent cross-check."""

    measure: str
    scalar_bits: float
    crosscheck_bits: float
    rows: tuple[AtomRow, ...]
    names: tuple[str, ...]
    policy: str | None = None
    posterior_id: str | None = None
    prior_id: str | None = None

    def __post_init__(self) -> None:
        tol = JITTER_CHECK_TOL if self.policy == "jitter" else CHECK_TOL
        gap = abs(self.scalar_bits - self.crosscheck_bits)
        if gap > tol:
            raise AssertionError(
                f"{self.measure}: atom form and direct form differ by {gap:.3e} bits (tol {tol:g})"
            )

    def atom_values(self) -> dict[Antichain, float]:
        return {row.atom: row.value_bits for row in self.rows}

    def value(self, atom_text: str) -> float:
        from .lattice import parse_atom

        target = parse_atom(atom_text, self.names)
        for row in self.rows:
            if row.atom == target:
                return row.value_bits
        raise KeyError(f"no atom {atom_text!r} in this report")


def _rows_from_table(table: AtomTable) -> tuple[AtomRow, ...]:
    return tuple(AtomRow(a, v) for a, v in table.items())


def _report_from_gid(measure: str, result: GidResult) -> MeasureReport:
    # policy metadata is omitted: these priors cover the posterior by construction
    return MeasureReport(
        measure=measure,
        scalar_bits=result.atoms.total(),
        crosscheck_bits=result.total_bits,
        rows=_rows_from_table(result.atoms),
        names=result.atoms.display_names(),
        posterior_id=result.posterior_id,
        prior_id=result.prior_id,
    )


# -- total correlation -----------------------------------------------------------


def total_correlation(dist: JointTable) -> float:
    """Deviation from full independence, in bits; 0 for a single variable."""
    if dist.n == 1:
        return 0.0
    return kl_divergence(dist, product_of_marginals(dist))


def tc_decomposition(
    dist: JointTable, fn: RedundancyFunction = H_MIN, jobs: int = 1
) -> MeasureReport:
    """Atom-wise total correlation: the update from independent parts to the joint.

    The product-of-marginals prior always covers the posterior support, so no
    support policy is needed.
    """
    result = partial_kl(dist, product_of_marginals(dist), fn=fn, jobs=jobs)
    return _report_from_gid("tc", result)


# -- cross entropy ----------------------------------------------------------------


def cross_entropy_decomposition(
    posterior: JointTable,
    prior: JointTable,
    fn: RedundancyFunction = H_MIN,
    policy: str = "error",
    jitter_eps: float = DEFAULT_JITTER_EPS,
    jobs: int = 1,
) -> MeasureReport:
    """Posterior-weighted expectation of the prior's local partial entropy atoms.

    Atom values sum to the cross entropy (the posterior-expected surprisal
    under the prior): a loss decomposition when the prior is a model.
    """
    if not posterior.same_shape(prior):
        raise DistributionError(
            "posterior and prior must share variable names and cardinalities"
        )
    posterior, prior = apply_support_policy(posterior, prior, policy, jitter_eps)
    lattice = build_lattice(posterior.n)
    states = posterior.states()
    prior_partials = local_partials_matrix(prior, lattice, states, fn, jobs=jobs)
    weights = [posterior.prob(s) for s in states]
    values = [
        math.fsum(w * v for w, v in zip(weights, row.tolist())) for row in prior_partials
    ]
    return MeasureReport(
        measure="xent",
        scalar_bits=math.fsum(values),
        crosscheck_bits=cross_entropy(posterior, prior),
        rows=tuple(AtomRow(a, v) for a, v in zip(lattice.atoms, values)),
        names=posterior.variable_names,
        policy=policy,
        posterior_id=posterior.label(),
        prior_id=prior.label(),
    )


# -- negentropy --------------------------------------------------------------------


def uniform_like(dist: JointTable) -> JointTable:
    """The uniform table over `dist`'s full Cartesian state space."""
    size = dist.state_space_size()
    states = itertools.product(*(range(c) for c in dist.cardinalities))
    return JointTable(
        dist.variable_names,
        dist.cardinalities,
        {s: 1.0 / size for s in states},
        name="uniform",
    )


def negentropy_decomposition(
    dist: JointTable, fn: RedundancyFunction = H_MIN, jobs: int = 1
) -> MeasureReport:
    """Atom-wise distance from the maximum-entropy (uniform) table."""
    result = partial_kl(dist, uniform_like(dist), fn=fn, jobs=jobs)
    direct = math.fsum(math.log2(c) for c in dist.cardinalities) - entropy(dist)
    return MeasureReport(
        measure="negent",
        scalar_bits=result.atoms.total(),
        crosscheck_bits=direct,
        rows=_rows_from_table(result.atoms),
        names=dist.variable_names,
        posterior_id=result.posterior_id,
        prior_id=result.prior_id,
    )


# -- O-information ------------------------------------------------------------------


def o_information(dist: JointTable) -> float:
    """Redundancy-vs-synergy balance: (2-N)*TC(whole) + sum of leave-one-out TCs."""
    n = dist.n
    if n < 3:
        raise DistributionError(f"o_information needs at least 3 variables, got {n}")
    whole = total_correlation(dist)
    loo = [
        total_correlation(marginalize(dist, [j for j in range(n) if j != i]))
        for i in range(n)
    ]
    return (2 - n) * whole + math.fsum(loo)


# Coefficients on total-correlation atoms, keyed by the atom's source-size
# signature. Single-pair atoms carry weight zero in the O-information, which is
# its blindness to purely bivariate structure; only the top atom ever counts as
# synergy.
_O_INFO_COEFFS: dict[tuple[int, ...], Fraction] = {
    (1, 1, 1): Fraction(2),
    (1, 1): Fraction(2),
    (1, 2): Fraction(2),
    (1,): Fraction(1),
    (2, 2, 2): Fraction(2),
    (2, 2): Fraction(1),
    (2,): Fraction(0),
    (3,): Fraction(-1),
}

# The TSE complexity penalizes low-lattice atoms in 1/3 steps and rewards
# high-lattice atoms symmetrically.
_TSE_COEFFS: dict[tuple[int, ...], Fraction] = {
    (1, 1, 1): Fraction(-1),
    (1, 1): Fraction(-2, 3),
    (1, 2): Fraction(-1, 3),
    (1,): Fraction(0),
    (2, 2, 2): Fraction(0),
    (2, 2): Fraction(1, 3),
    (2,): Fraction(2, 3),
    (3,): Fraction(1),
}


def _signature(alpha: Antichain) -> tuple[int, ...]:
    return tuple(len(s) for s in alpha.sources)


def coefficient_table(measure: str, n: int = 3) -> dict[Antichain, Fraction]:
    """The stored atom-pattern coefficients, expanded over the n=3 lattice."""
    if n != 3:
        raise DistributionError(f"coefficient tables are defined for n=3 only, got n={n}")
    table = {"oinfo": _O_INFO_COEFFS, "tse": _TSE_COEFFS}[measure]
    lattice = build_lattice(3)
    return {alpha: table[_signature(alpha)] for alpha in lattice.atoms}


def _weighted_report(
    measure: str,
    dist: JointTable,
    coeffs: dict[Antichain, Fraction],
    direct: float,
    fn: RedundancyFunction,
    jobs: int = 1,
) -> MeasureReport:
    tc_report = tc_decomposition(dist, fn=fn, jobs=jobs)
    rows = tuple(
        AtomRow(row.atom, row.value_bits, coefficient=coeffs[row.atom])
        for row in tc_report.rows
    )
    # exact rationals until the one final multiply: sum (D*c) * v, then / D
    denom = math.lcm(*(c.denominator for c in coeffs.values()))
    scalar = (
        math.fsum(int(row.coefficient * denom) * row.value_bits for row in rows) / denom
    )
    return MeasureReport(
        measure=measure,
        scalar_bits=scalar,
        crosscheck_bits=direct,
        rows=rows,
        names=dist.variable_names,
    )


def o_information_atoms(
    dist: JointTable, fn: RedundancyFunction = H_MIN, jobs: int = 1
) -> MeasureReport:
    """O-information as a weighted sum of total-correlation atoms (3 variables only)."""
    if dist.n != 3:
        raise DistributionError(
            f"the atom form of the O-information is defined for n=3, got n={dist.n}"
        )
    return _weighted_report(
        "oinfo", dist, coefficient_table("oinfo"), o_information(dist), fn, jobs
    )


# -- TSE complexity ------------------------------------------------------------------


def tse(dist: JointTable) -> float:
    """Integration/segregation balance across scales.

    For each subset size, the gap between the size-proportional share of the
    whole's total correlation and the average total correlation actually found
    in subsets of that size. Single variables have zero total correlation.
    """
    n = dist.n
    if n < 2:
        raise DistributionError(f"tse needs at least 2 variables, got {n}")
    whole = total_correlation(dist)
    # sum_i i/n == (n+1)/2 exactly, so the whole-system share is one multiply
    value = whole * (n + 1) / 2
    for size in range(2, n + 1):
        subset_tcs = [
            total_correlation(marginalize(dist, combo))
            for combo in itertools.combinations(range(n), size)
        ]
        value -= math.fsum(subset_tcs) / len(subset_tcs)
    return value


def tse_atoms(
    dist: JointTable, fn: RedundancyFunction = H_MIN, jobs: int = 1
) -> MeasureReport:
    """TSE complexity as a weighted sum of total-correlation atoms (3 variables only)."""
    if dist.n != 3:
        raise DistributionError(
            f"the atom form of the TSE complexity is defined for n=3, got n={dist.n}"
        )
    return _weighted_report("tse", dist, coefficient_table("tse"), tse(dist), fn, jobs)


# -- single-target recoveries -----------------------------------------------------


def _target_index(dist: JointTable, target: int | str) -> int:
    if isinstance(target, str):
        try:
            return dist.variable_names.index(target)
        except ValueError:
            raise DistributionError(
                f"no variable named {target!r}; have {dist.variable_names}"
            ) from None
    if not 0 <= target < dist.n:
        raise DistributionError(f"target index {target} out of range for n={dist.n}")
    return int(target)


def _mutual_information(dist: JointTable, inputs: Sequence[int], target: int) -> float:
    pair = marginalize(dist, inputs)
    tmarg = marginalize(dist, [target])
    return entropy(pair) + entropy(tmarg) - entropy(dist)


def pid_conditional(
    dist: JointTable, target: int | str = -1, fn: RedundancyFunction = H_MIN
) -> MeasureReport:
    """Four-atom single-target decomposition of I(inputs; target), 3 variables.

    For each target value, decompose the update from the input marginal to the
    conditional input table on the two-variable lattice, then average the atoms
    with the target's probabilities. The atoms sum to the mutual information,
    and the bottom-plus-unique sums match the single-input informations.
    """
    if dist.n != 3:
        raise DistributionError(f"pid needs exactly 3 variables, got n={dist.n}")
    t = _target_index(dist, target if target != -1 else dist.n - 1)
    inputs = [i for i in range(dist.n) if i != t]
    input_marginal = marginalize(dist, inputs)
    t_marginal = dist.marginal_probs((t,))

    lattice = build_lattice(2)
    acc: list[list[float]] = [[] for _ in lattice.atoms]
    weights: list[float] = []
    for (t_value,), p_t in t_marginal.items():
        conditional = condition(dist, [t], [t_value])
        # a conditional cannot reach states its own marginal misses
        assert not support_check(conditional, input_marginal)
        result = partial_kl(conditional, input_marginal, fn=fn)
        for k, v in enumerate(result.atoms.values):
            acc[k].append(float(v))
        weights.append(p_t)
    values = [math.fsum(w * v for w, v in zip(weights, column)) for column in acc]

    return MeasureReport(
        measure="pid_conditional",
        scalar_bits=math.fsum(values),
        crosscheck_bits=_mutual_information(dist, inputs, t),
        rows=tuple(AtomRow(a, v) for a, v in zip(lattice.atoms, values)),
        names=tuple(dist.variable_names[i] for i in inputs),
        posterior_id=dist.label(),
    )


def pid_joint(
    dist: JointTable, target: int | str = -1, fn: RedundancyFunction = H_MIN
) -> MeasureReport:
    """Eighteen-atom single-target decomposition of I(inputs; target), 3 variables.

    Decomposes the update from (input-pair marginal x target marginal) to the
    full joint, on the three-variable lattice. Sums to the same mutual
    information as :func:`pid_conditional` but distributes it over atoms in a
    genuinely different way; no linear correspondence between the two is
    claimed.
    """
    if dist.n != 3:
        raise DistributionError(f"pid needs exactly 3 variables, got n={dist.n}")
    t = _target_index(dist, target if target != -1 else dist.n - 1)
    inputs = [i for i in range(dist.n) if i != t]

    pair_marg = dist.marginal_probs(tuple(inputs))
    t_marg = dist.marginal_probs((t,))
    entries: dict[tuple[int, ...], float] = {}
    for pair_state, p_pair in pair_marg.items():
        for (t_value,), p_t in t_marg.items():
            state = [0] * dist.n
            for i, v in zip(inputs, pair_state):
                state[i] = v
            state[t] = t_value
            entries[tuple(state)] = p_pair * p_t
    prior = JointTable(dist.variable_names, dist.cardinalities, entries)
    assert not support_check(dist, prior)

    result = partial_kl(dist, prior, fn=fn)
    return MeasureReport(
        measure="pid_joint",
        scalar_bits=result.atoms.total(),
        crosscheck_bits=_mutual_information(dist, inputs, t),
        rows=_rows_from_table(result.atoms),
        names=dist.variable_names,
        posterior_id=result.posterior_id,
        prior_id=result.prior_id,
    )
