"""Discrete joint probability tables and the operations the decompositions build on.

A :class:`JointTable` is a distribution over N named variables with finite
cardinalities, stored sparsely as a map from full state tuples to
probabilities. Tables are immutable after construction; every operation here
is a pure function returning a new table, so tables can be shared freely
across threads.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

State = tuple[int, ...]

# Tables are renormalized on construction; totals further off than this are
# rejected instead of silently rescaled.
NORMALIZATION_REJECT_TOL = 1e-6
NORMALIZATION_TOL = 1e-9
DEFAULT_JITTER_EPS = 1e-6

SUPPORT_POLICIES = ("error", "jitter", "restrict")


class DistributionError(ValueError):
    """Malformed table, or an operation applied outside its domain."""


class SupportViolationError(DistributionError):
    """The posterior puts mass on states the prior says are impossible."""

    def __init__(self, states: Sequence[State]):
        self.states = sorted(tuple(s) for s in states)
        head = ", ".join(str(s) for s in self.states[:8])
        tail = "" if len(self.states) <= 8 else f", ... (+{len(self.states) - 8} more)"
        super().__init__(
            f"{len(self.states)} posterior state(s) outside prior support: {head}{tail}"
        )


@dataclass(frozen=True)
class Source:
    """A nonempty subset of variable indices, treated as one observable block."""

    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        idx = tuple(self.indices)
        if not idx:
            raise ValueError("a source must contain at least one variable index")
        if any(not isinstance(i, int) or i < 0 for i in idx):
            raise ValueError(f"source indices must be non-negative integers: {idx}")
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate variable index in source: {idx}")
        object.__setattr__(self, "indices", tuple(sorted(idx)))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def issubset(self, other: "Source") -> bool:
        return set(self.indices) <= set(other.indices)


def as_source(spec: Source | Iterable[int]) -> Source:
    return spec if isinstance(spec, Source) else Source(tuple(spec))


def _validate_names(names: Sequence[str]) -> tuple[str, ...]:
    names = tuple(str(v) for v in names)
    if len(set(names)) != len(names):
        raise DistributionError(f"duplicate variable names: {names}")
    for v in names:
        if not v or any(ch in "{}," or ch.isspace() for ch in v):
            raise DistributionError(
                f"variable name {v!r} invalid: names must be nonempty and free of "
                "braces, commas and whitespace (they appear in atom strings)"
            )
    return names


class JointTable:
    """A validated, immutable joint distribution.

    States with probability exactly zero may be omitted; the support is the
    set of stored states with p > 0. Entries are renormalized on construction
    and rejected when the total is off by more than 1e-6.
    """

    __slots__ = ("variable_names", "cardinalities", "name", "_probs", "_marginals", "_digest")

    def __init__(
        self,
        variable_names: Sequence[str],
        cardinalities: Sequence[int],
        entries: Mapping[Sequence[int], float] | Iterable[tuple[Sequence[int], float]],
        name: str = "",
    ):
        names = _validate_names(variable_names)
        cards = tuple(int(c) for c in cardinalities)
        if len(cards) != len(names):
            raise DistributionError(
                f"{len(names)} variable names but {len(cards)} cardinalities"
            )
        if not names:
            raise DistributionError("a table needs at least one variable")
        if any(c < 1 for c in cards):
            raise DistributionError(f"cardinalities must be positive: {cards}")

        items = entries.items() if isinstance(entries, Mapping) else entries
        probs: dict[State, float] = {}
        for raw_state, p in items:
            state = tuple(int(x) for x in raw_state)
            if len(state) != len(names):
                raise DistributionError(
                    f"state {state} has {len(state)} coordinates, expected {len(names)}"
                )
            for i, (x, c) in enumerate(zip(state, cards)):
                if not 0 <= x < c:
                    raise DistributionError(
                        f"state {state}: coordinate {i} = {x} outside [0, {c})"
                    )
            p = float(p)
            if not math.isfinite(p) or p < 0:
                raise DistributionError(f"state {state}: probability {p} is not a finite non-negative real")
            if state in probs:
                raise DistributionError(f"duplicate state {state}")
            if p > 0.0:
                probs[state] = p

        total = math.fsum(probs.values())
        if abs(total - 1.0) > NORMALIZATION_REJECT_TOL:
            raise DistributionError(f"probabilities sum to {total!r}, not 1 (tolerance {NORMALIZATION_REJECT_TOL})")
        if not probs:
            raise DistributionError("empty support: all probabilities are zero")

        object.__setattr__(self, "variable_names", names)
        object.__setattr__(self, "cardinalities", cards)
        object.__setattr__(self, "name", str(name))
        object.__setattr__(
            self, "_probs", {s: p / total for s, p in sorted(probs.items())}
        )
        object.__setattr__(self, "_marginals", {})
        object.__setattr__(self, "_digest", None)

    def __setattr__(self, key, value):  # pragma: no cover - guard rail
        raise AttributeError("JointTable is immutable")

    # -- basic views ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.variable_names)

    def states(self) -> tuple[State, ...]:
        """Support states in sorted order."""
        return tuple(self._probs.keys())

    def items(self) -> Iterator[tuple[State, float]]:
        return iter(self._probs.items())

    def prob(self, state: Sequence[int]) -> float:
        return self._probs.get(tuple(state), 0.0)

    def __len__(self) -> int:
        return len(self._probs)

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<JointTable{label} n={self.n} support={len(self)}>"

    def same_shape(self, other: "JointTable") -> bool:
        return (
            self.variable_names == other.variable_names
            and self.cardinalities == other.cardinalities
        )

    def state_space_size(self) -> int:
        return math.prod(self.cardinalities)

    def rename(self, name: str) -> "JointTable":
        return JointTable(self.variable_names, self.cardinalities, self._probs, name=name)

    # -- cached marginals ----------------------------------------------------

    def marginal_probs(self, indices: Sequence[int]) -> Mapping[State, float]:
        """Marginal probability of each projection onto `indices` (sorted, cached)."""
        key = tuple(indices)
        cached = self._marginals.get(key)
        if cached is not None:
            return cached
        acc: dict[State, float] = {}
        for state, p in self._probs.items():
            proj = tuple(state[i] for i in key)
            acc[proj] = acc.get(proj, 0.0) + p
        result = dict(sorted(acc.items()))
        self._marginals[key] = result
        return result

    def digest(self) -> str:
        """Deterministic content hash, used to identify unnamed tables in reports."""
        if self._digest is None:
            payload = json.dumps(
                {
                    "variables": list(self.variable_names),
                    "cardinalities": list(self.cardinalities),
                    "states": [[list(s), f"{p:.17g}"] for s, p in self._probs.items()],
                },
                separators=(",", ":"),
            )
            object.__setattr__(
                self, "_digest", hashlib.sha256(payload.encode()).hexdigest()[:12]
            )
        return self._digest

    def label(self) -> str:
        return self.name or f"sha256:{self.digest()}"


# -- operations ---------------------------------------------------------------


def _check_indices(dist: JointTable, indices: Sequence[int]) -> None:
    for i in indices:
        if not 0 <= i < dist.n:
            raise DistributionError(f"variable index {i} out of range for n={dist.n}")


def marginalize(dist: JointTable, keep: Source | Iterable[int]) -> JointTable:
    """Project onto the `keep` variables, summing out the rest."""
    keep = as_source(keep)
    _check_indices(dist, keep.indices)
    return JointTable(
        [dist.variable_names[i] for i in keep],
        [dist.cardinalities[i] for i in keep],
        dist.marginal_probs(keep.indices),
    )


def product_of_marginals(dist: JointTable) -> JointTable:
    """The fully factorized table with the same single-variable marginals.

    The result has full product support: every combination of individually
    possible values appears.
    """
    marginals = [dist.marginal_probs((i,)) for i in range(dist.n)]
    entries = {}
    for combo in itertools.product(*(sorted(m.items()) for m in marginals)):
        state = tuple(v[0] for v, _ in combo)
        entries[state] = math.prod(p for _, p in combo)
    return JointTable(dist.variable_names, dist.cardinalities, entries)


def condition(
    dist: JointTable, on: Iterable[int], equals: Sequence[int]
) -> JointTable:
    """Condition on the event (variables `on`) == `equals`, dropping those variables.

    Conditioning on nothing returns the table unchanged. A zero-probability
    event is an error: the conditional is undefined.
    """
    on = tuple(on)
    equals = tuple(int(x) for x in equals)
    if len(on) != len(equals):
        raise DistributionError(f"{len(on)} conditioning variables but {len(equals)} values")
    if not on:
        return dist
    _check_indices(dist, on)
    if len(set(on)) != len(on):
        raise DistributionError(f"duplicate conditioning index in {on}")

    on_set = dict(zip(on, equals))
    rest = [i for i in range(dist.n) if i not in on_set]
    if not rest:
        # conditioning on every variable: degenerate single-state check
        raise DistributionError("conditioning on all variables leaves no table")
    entries: dict[State, float] = {}
    for state, p in dist.items():
        if all(state[i] == v for i, v in on_set.items()):
            proj = tuple(state[i] for i in rest)
            entries[proj] = entries.get(proj, 0.0) + p
    mass = math.fsum(entries.values())
    if mass <= 0.0:
        raise DistributionError(
            f"conditioning event {dict(zip(on, equals))} has probability zero"
        )
    return JointTable(
        [dist.variable_names[i] for i in rest],
        [dist.cardinalities[i] for i in rest],
        {s: p / mass for s, p in entries.items()},
    )


def local_surprisal(
    dist: JointTable, source: Source | Iterable[int], state: Sequence[int]
) -> float:
    """-log2 of the marginal probability of `state`'s projection onto `source`, in bits."""
    source = as_source(source)
    _check_indices(dist, source.indices)
    state = tuple(int(x) for x in state)
    if len(state) != dist.n:
        raise DistributionError(f"state {state} has wrong length for n={dist.n}")
    proj = tuple(state[i] for i in source)
    p = dist.marginal_probs(source.indices).get(proj, 0.0)
    if p <= 0.0:
        raise DistributionError(
            f"projection {proj} of state {state} onto {source.indices} has "
            "probability zero: surprisal is infinite"
        )
    return -math.log2(p)


def entropy(dist: JointTable) -> float:
    """Shannon entropy in bits (expectation over the support, so 0*log 0 never arises)."""
    return -math.fsum(p * math.log2(p) for _, p in dist.items())


def support_check(posterior: JointTable, prior: JointTable) -> list[State]:
    """States where the posterior is positive but the prior is zero (empty = compatible)."""
    if not posterior.same_shape(prior):
        raise DistributionError(
            "posterior and prior must share variable names and cardinalities: "
            f"{posterior.variable_names}/{posterior.cardinalities} vs "
            f"{prior.variable_names}/{prior.cardinalities}"
        )
    return sorted(s for s, _ in posterior.items() if prior.prob(s) == 0.0)


def apply_support_policy(
    posterior: JointTable,
    prior: JointTable,
    policy: str = "error",
    jitter_eps: float = DEFAULT_JITTER_EPS,
) -> tuple[JointTable, JointTable]:
    """Resolve prior/posterior support mismatches.

    error    fail, listing the offending states (the default: silently editing
             data is dangerous).
    jitter   add `jitter_eps` to every structurally possible prior state and
             renormalize, so the prior covers everything.
    restrict drop posterior states outside the prior's support and renormalize
             the posterior.

    Compatible pairs are returned unchanged under every policy.
    """
    if policy not in SUPPORT_POLICIES:
        raise DistributionError(f"unknown support policy {policy!r}; expected one of {SUPPORT_POLICIES}")
    violations = support_check(posterior, prior)
    if not violations:
        return posterior, prior
    if policy == "error":
        raise SupportViolationError(violations)
    if policy == "jitter":
        if jitter_eps <= 0:
            raise DistributionError(f"jitter epsilon must be positive, got {jitter_eps}")
        entries = {
            state: prior.prob(state) + jitter_eps
            for state in itertools.product(*(range(c) for c in prior.cardinalities))
        }
        total = math.fsum(entries.values())
        jittered = JointTable(
            prior.variable_names,
            prior.cardinalities,
            {s: p / total for s, p in entries.items()},
            name=prior.name,
        )
        return posterior, jittered
    # restrict
    kept = {s: p for s, p in posterior.items() if prior.prob(s) > 0.0}
    if not kept:
        raise DistributionError(
            "restrict policy leaves an empty posterior: supports are disjoint"
        )
    mass = math.fsum(kept.values())
    restricted = JointTable(
        posterior.variable_names,
        posterior.cardinalities,
        {s: p / mass for s, p in kept.items()},
        name=posterior.name,
    )
    return restricted, prior


# -- file format ---------------------------------------------------------------
#
# {"variables": ["X1","X2","T"], "cardinalities": [2,2,2],
#  "states": [{"s": [0,0,0], "p": 0.25}, ...]}
#
# Omitted states have probability zero; duplicated states are a load error.


def table_from_dict(payload: Mapping, name: str = "") -> JointTable:
    try:
        variables = payload["variables"]
        cardinalities = payload["cardinalities"]
        states = payload["states"]
    except (KeyError, TypeError) as exc:
        raise DistributionError(f"distribution JSON missing field: {exc}") from exc
    if not isinstance(states, list):
        raise DistributionError("'states' must be a list of {\"s\": [...], \"p\": ...} records")
    entries: list[tuple[Sequence[int], float]] = []
    seen: set[State] = set()
    for record in states:
        try:
            s, p = record["s"], record["p"]
        except (KeyError, TypeError) as exc:
            raise DistributionError(f"malformed state record {record!r}") from exc
        key = tuple(int(x) for x in s)
        if key in seen:
            raise DistributionError(f"duplicate state {key} in distribution file")
        seen.add(key)
        entries.append((key, p))
    return JointTable(variables, cardinalities, entries, name=name)


def table_to_dict(dist: JointTable) -> dict:
    return {
        "variables": list(dist.variable_names),
        "cardinalities": list(dist.cardinalities),
        "states": [{"s": list(s), "p": p} for s, p in dist.items()],
    }


def load_table(path: str | Path) -> JointTable:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DistributionError(f"{path}: invalid JSON ({exc})") from exc
    return table_from_dict(payload, name=path.stem)


def dumps_table(dist: JointTable) -> str:
    return json.dumps(table_to_dict(dist), indent=2)


def save_table(dist: JointTable, path: str | Path) -> None:
    Path(path).write_text(dumps_table(dist) + "\n")
