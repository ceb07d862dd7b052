"""The antichain lattice over variable subsets, and Möbius inversion on it.

Atoms are antichains: sets of pairwise subset-incomparable sources. They are
ordered by `alpha <= beta iff every source of beta contains some source of
alpha`, which runs from the all-singletons antichain at the bottom (fully
redundant) to the single whole-system source at the top (fully synergistic).

Internally each source is a bitmask over the n variables and each atom a
sorted tuple of bitmasks, so subset tests are single AND operations and the
order relation over all atom pairs vectorizes with numpy. Atom counts grow
like the Dedekind numbers (1, 4, 18, 166, 7579 for n = 1..5), hence the hard
cap on n.
"""
from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .distributions import Source

DEFAULT_MAX_N = 5
MAX_N_ENV_VAR = "GID_MAX_LATTICE_N"


class LatticeCapError(ValueError):
    pass


def _mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def _indices_of(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def _source_sort_key(mask: int) -> tuple[int, tuple[int, ...]]:
    # sources order by (size, lexicographic indices); this is the canonical
    # order both inside an atom and for the lattice's source list
    idx = _indices_of(mask)
    return (len(idx), idx)


@dataclass(frozen=True)
class Antichain:
    """One lattice atom: pairwise incomparable sources over n variables.

    Construction canonicalizes the source order (by size, then indices), which
    is the equality/hash key.
    """

    n: int
    sources: tuple[Source, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"antichain needs n >= 1, got {self.n}")
        if not self.sources:
            raise ValueError("an antichain must contain at least one source")
        srcs = tuple(s if isinstance(s, Source) else Source(tuple(s)) for s in self.sources)
        masks = []
        for s in srcs:
            if any(i >= self.n for i in s.indices):
                raise ValueError(f"source {s.indices} out of range for n={self.n}")
            masks.append(_mask_of(s.indices))
        if len(set(masks)) != len(masks):
            raise ValueError(f"duplicate sources in antichain: {[s.indices for s in srcs]}")
        for i, a in enumerate(masks):
            for b in masks[i + 1 :]:
                if a & b == a or a & b == b:
                    raise ValueError(
                        f"sources {_indices_of(a)} and {_indices_of(b)} are "
                        "subset-comparable; an antichain needs incomparable sources"
                    )
        order = sorted(range(len(masks)), key=lambda k: _source_sort_key(masks[k]))
        object.__setattr__(self, "sources", tuple(srcs[k] for k in order))

    @classmethod
    def of(cls, n: int, *index_groups: Iterable[int]) -> "Antichain":
        return cls(n, tuple(Source(tuple(g)) for g in index_groups))

    def masks(self) -> tuple[int, ...]:
        return tuple(_mask_of(s.indices) for s in self.sources)

    def __iter__(self) -> Iterator[Source]:
        return iter(self.sources)

    def __str__(self) -> str:
        return format_atom(self)


def leq(alpha: Antichain, beta: Antichain) -> bool:
    """True when every source of beta contains some source of alpha."""
    if alpha.n != beta.n:
        raise ValueError(f"antichains over different systems: n={alpha.n} vs n={beta.n}")
    amasks = alpha.masks()
    return all(any(a & b == a for a in amasks) for b in beta.masks())


# -- atom string syntax --------------------------------------------------------
#
# `{X1}{X2}{T}` is the antichain of three singleton sources, `{X1,X2}` a single
# two-variable source. Parser and printer round-trip.

_ATOM_TOKEN = re.compile(r"\{([^{}]*)\}")


def _default_names(n: int) -> tuple[str, ...]:
    return tuple(f"X{i + 1}" for i in range(n))


def format_atom(alpha: Antichain, names: Sequence[str] | None = None) -> str:
    names = tuple(names) if names is not None else _default_names(alpha.n)
    if len(names) != alpha.n:
        raise ValueError(f"{len(names)} names for an n={alpha.n} antichain")
    return "".join(
        "{" + ",".join(names[i] for i in src.indices) + "}" for src in alpha.sources
    )


def parse_atom(text: str, names: Sequence[str] | None = None, n: int | None = None) -> Antichain:
    """Parse `{X1}{X2,T}`-style atom strings back into an Antichain."""
    if names is None:
        if n is None:
            raise ValueError("parse_atom needs variable names or n")
        names = _default_names(n)
    names = tuple(names)
    lookup = {v: i for i, v in enumerate(names)}
    stripped = text.strip()
    tokens = _ATOM_TOKEN.findall(stripped)
    if not tokens or "".join("{" + t + "}" for t in tokens) != stripped:
        raise ValueError(f"malformed atom string {text!r}")
    groups = []
    for token in tokens:
        parts = [p.strip() for p in token.split(",")]
        if any(not p for p in parts):
            raise ValueError(f"malformed source {{{token}}} in atom string {text!r}")
        try:
            groups.append(tuple(lookup[p] for p in parts))
        except KeyError as exc:
            raise ValueError(f"unknown variable {exc.args[0]!r} in atom string {text!r}") from exc
    return Antichain.of(len(names), *groups)


# -- lattice construction --------------------------------------------------------


def _enumerate_antichains(num_sources: int, source_masks: Sequence[int]) -> list[tuple[int, ...]]:
    """Depth-first extension by later, incomparable sources; each antichain found once."""
    found: list[tuple[int, ...]] = []
    chosen: list[int] = []

    def extend(start: int) -> None:
        for k in range(start, num_sources):
            m = source_masks[k]
            ok = True
            for c in chosen:
                inter = c & m
                if inter == c or inter == m:
                    ok = False
                    break
            if ok:
                chosen.append(m)
                found.append(tuple(chosen))
                extend(k + 1)
                chosen.pop()

    extend(0)
    return found


def _atom_sort_key(masks: tuple[int, ...]) -> tuple:
    # Display order: group by smallest source size going up, more sources
    # first within a group, then by size profile and indices. For n=3 this is
    # the conventional bottom-to-top table layout.
    keys = [_source_sort_key(m) for m in masks]
    keys.sort()
    return (keys[0][0], -len(masks), tuple(k[0] for k in keys), tuple(k[1] for k in keys))


class RedundancyLattice:
    """All antichain atoms for n variables plus the order structure.

    `atoms` is the canonical display ordering. `down_sets[i]` holds the indices
    of atoms strictly below atom i; `topo_order` is a linear extension of the
    order (ascending down-set size) used for inversion.
    """

    __slots__ = (
        "n",
        "atoms",
        "index",
        "sources",
        "source_index",
        "atom_masks",
        "atom_source_ids",
        "down_sets",
        "topo_order",
        "bottom_index",
        "top_index",
    )

    def __init__(self, n: int, atom_masks: list[tuple[int, ...]]):
        self.n = n
        atom_masks = sorted(
            (tuple(sorted(m, key=_source_sort_key)) for m in atom_masks),
            key=_atom_sort_key,
        )
        self.atom_masks = atom_masks
        self.atoms = tuple(
            Antichain(n, tuple(Source(_indices_of(m)) for m in masks))
            for masks in atom_masks
        )
        self.index = {atom: i for i, atom in enumerate(self.atoms)}

        all_masks = sorted(range(1, 1 << n), key=_source_sort_key)
        self.sources = tuple(Source(_indices_of(m)) for m in all_masks)
        self.source_index = {m: i for i, m in enumerate(all_masks)}
        self.atom_source_ids = [
            np.array([self.source_index[m] for m in masks], dtype=np.intp)
            for masks in atom_masks
        ]

        self._build_order(all_masks)
        sizes = np.array([len(d) for d in self.down_sets], dtype=np.int64)
        self.topo_order = np.argsort(sizes, kind="stable")
        self.bottom_index = int(self.topo_order[0])
        self.top_index = int(np.argmax(sizes))

    def _build_order(self, all_masks: list[int]) -> None:
        # For each source s, the set of sources that contain it, as a bitmap over
        # source ids; an atom's "reach" is the union over its sources. Then
        # alpha <= beta iff beta's own-source bitmap is inside alpha's reach.
        num_sources = len(all_masks)
        supersets = {}
        for m in all_masks:
            bits = 0
            for other in all_masks:
                if m & other == m:
                    bits |= 1 << self.source_index[other]
            supersets[m] = bits

        own = []
        reach = []
        for masks in self.atom_masks:
            o = 0
            r = 0
            for m in masks:
                o |= 1 << self.source_index[m]
                r |= supersets[m]
            own.append(o)
            reach.append(r)

        count = len(self.atom_masks)
        if num_sources <= 63:
            own_arr = np.array(own, dtype=np.uint64)
            not_reach = np.array([~r & ((1 << num_sources) - 1) for r in reach], dtype=np.uint64)
            down_sets = []
            for i in range(count):
                below = np.flatnonzero((own_arr[i] & not_reach) == 0)
                down_sets.append(below[below != i].astype(np.intp))
        else:  # only reachable when the cap is overridden beyond n=6
            down_sets = [
                np.array(
                    [j for j in range(count) if j != i and (own[i] & ~reach[j]) == 0],
                    dtype=np.intp,
                )
                for i in range(count)
            ]
        self.down_sets = down_sets

    def __len__(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        return f"<RedundancyLattice n={self.n} atoms={len(self.atoms)}>"

    @property
    def bottom(self) -> Antichain:
        return self.atoms[self.bottom_index]

    @property
    def top(self) -> Antichain:
        return self.atoms[self.top_index]

    def atom_index(self, alpha: Antichain) -> int:
        try:
            return self.index[alpha]
        except KeyError:
            raise KeyError(f"{alpha} is not an atom of the n={self.n} lattice") from None

    # -- vectorized transforms (columns = independent value vectors) -----------

    def invert_matrix(self, cumulative: np.ndarray) -> np.ndarray:
        """Partial values from cumulative values, column-wise.

        partial[i] = cumulative[i] - sum of partial over atoms strictly below i.
        """
        C = np.asarray(cumulative, dtype=np.float64)
        squeeze = C.ndim == 1
        if squeeze:
            C = C[:, None]
        if C.shape[0] != len(self.atoms):
            raise ValueError(f"expected {len(self.atoms)} atom rows, got {C.shape[0]}")
        P = np.empty_like(C)
        for i in self.topo_order:
            below = self.down_sets[i]
            if below.size:
                P[i] = C[i] - P[below].sum(axis=0)
            else:
                P[i] = C[i]
        return P[:, 0] if squeeze else P

    def accumulate_matrix(self, partial: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`invert_matrix`: sum partials over closed down-sets."""
        P = np.asarray(partial, dtype=np.float64)
        squeeze = P.ndim == 1
        if squeeze:
            P = P[:, None]
        if P.shape[0] != len(self.atoms):
            raise ValueError(f"expected {len(self.atoms)} atom rows, got {P.shape[0]}")
        C = np.empty_like(P)
        for i in range(len(self.atoms)):
            below = self.down_sets[i]
            C[i] = P[i] + P[below].sum(axis=0) if below.size else P[i]
        return C[:, 0] if squeeze else C


_LATTICE_CACHE: dict[int, RedundancyLattice] = {}


def lattice_cap() -> int:
    raw = os.environ.get(MAX_N_ENV_VAR)
    if raw is None:
        return DEFAULT_MAX_N
    try:
        return int(raw)
    except ValueError:
        raise LatticeCapError(f"{MAX_N_ENV_VAR}={raw!r} is not an integer") from None


def build_lattice(n: int) -> RedundancyLattice:
    """Build (or fetch the cached) lattice for n variables.

    Capped at n=5 by default because the atom count explodes like the Dedekind
    numbers; set GID_MAX_LATTICE_N to override if you really mean it.
    """
    cap = lattice_cap()
    if not 1 <= n <= cap:
        raise LatticeCapError(
            f"lattice size n={n} outside [1, {cap}] "
            f"(antichain counts grow like the Dedekind numbers; raise {MAX_N_ENV_VAR} to override)"
        )
    cached = _LATTICE_CACHE.get(n)
    if cached is None:
        source_masks = sorted(range(1, 1 << n), key=_source_sort_key)
        cached = RedundancyLattice(n, _enumerate_antichains(len(source_masks), source_masks))
        _LATTICE_CACHE[n] = cached
    return cached


# -- atom-indexed value tables ---------------------------------------------------


def format_value(v: float) -> str:
    """12 significant digits, trailing zeros trimmed; exact zeros print as 0."""
    if v == 0.0:
        return "0"
    return f"{v:.12g}"


class AtomTable:
    """A value in bits for every atom of a lattice, in canonical atom order."""

    __slots__ = ("lattice", "values", "names")

    def __init__(
        self,
        lattice: RedundancyLattice,
        values: np.ndarray | Sequence[float],
        names: Sequence[str] | None = None,
    ):
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != (len(lattice.atoms),):
            raise ValueError(
                f"expected {len(lattice.atoms)} values for the n={lattice.n} lattice, "
                f"got shape {arr.shape}"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "names", tuple(names) if names is not None else None)

    def __setattr__(self, key, value):  # pragma: no cover - guard rail
        raise AttributeError("AtomTable is immutable")

    @classmethod
    def from_mapping(
        cls,
        lattice: RedundancyLattice,
        mapping: Mapping[Antichain, float],
        names: Sequence[str] | None = None,
    ) -> "AtomTable":
        missing = [a for a in lattice.atoms if a not in mapping]
        if missing:
            raise ValueError(f"missing values for {len(missing)} atoms, e.g. {missing[0]}")
        extra = len(mapping) - len(lattice.atoms)
        if extra:
            raise ValueError(f"{extra} value(s) for atoms not in the n={lattice.n} lattice")
        return cls(lattice, [mapping[a] for a in lattice.atoms], names=names)

    def __getitem__(self, alpha: Antichain) -> float:
        return float(self.values[self.lattice.atom_index(alpha)])

    def get(self, text_or_atom: str | Antichain) -> float:
        if isinstance(text_or_atom, str):
            text_or_atom = parse_atom(text_or_atom, self.display_names())
        return self[text_or_atom]

    def __iter__(self) -> Iterator[tuple[Antichain, float]]:
        return zip(self.lattice.atoms, (float(v) for v in self.values))

    def items(self) -> Iterator[tuple[Antichain, float]]:
        return iter(self)

    def __len__(self) -> int:
        return len(self.values)

    def total(self) -> float:
        return math.fsum(self.values.tolist())

    def display_names(self) -> tuple[str, ...]:
        return self.names if self.names is not None else _default_names(self.lattice.n)

    def atom_strings(self) -> tuple[str, ...]:
        names = self.display_names()
        return tuple(format_atom(a, names) for a in self.lattice.atoms)

    def to_tsv(self) -> str:
        lines = ["atom\tvalue_bits"]
        for text, v in zip(self.atom_strings(), self.values):
            lines.append(f"{text}\t{format_value(float(v))}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"<AtomTable n={self.lattice.n} atoms={len(self)} total={self.total():.6g}>"


def moebius_inversion(lattice: RedundancyLattice, cumulative: AtomTable) -> AtomTable:
    """Turn cumulative atom values into partial (exclusive) atom values."""
    if cumulative.lattice is not lattice and cumulative.lattice.n != lattice.n:
        raise ValueError("cumulative table belongs to a different lattice")
    return AtomTable(lattice, lattice.invert_matrix(cumulative.values), names=cumulative.names)


def accumulate(lattice: RedundancyLattice, partial: AtomTable) -> AtomTable:
    """Inverse of :func:`moebius_inversion`."""
    if partial.lattice is not lattice and partial.lattice.n != lattice.n:
        raise ValueError("partial table belongs to a different lattice")
    return AtomTable(lattice, lattice.accumulate_matrix(partial.values), names=partial.names)


def top_value(lattice: RedundancyLattice, cumulative: AtomTable) -> float:
    """Cumulative value at the top atom: the full joint quantity."""
    return float(cumulative.values[lattice.top_index])
