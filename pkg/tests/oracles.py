"""Independent reference implementations the tests check the library against.

Everything here is deliberately naive and shares no code with the library's
bitmask/numpy paths.
"""
from itertools import combinations

from gidkit import leq


def naive_antichain_count(n: int) -> int:
    """Filter every subset of the nonempty sources for pairwise incomparability."""
    universe = range(n)
    sources = [frozenset(c) for r in range(1, n + 1) for c in combinations(universe, r)]
    count = 0
    for r in range(1, len(sources) + 1):
        for combo in combinations(sources, r):
            if all(not (a <= b or b <= a) for a, b in combinations(combo, 2)):
                count += 1
    return count


def extension_antichain_count(n: int) -> int:
    """Count antichains by extending with incomparable later sources (for n=5,
    where the naive filter is infeasible)."""
    universe = range(n)
    sources = [frozenset(c) for r in range(1, n + 1) for c in combinations(universe, r)]

    def extend(chosen, start):
        total = 0
        for k in range(start, len(sources)):
            s = sources[k]
            if all(not (s <= c or c <= s) for c in chosen):
                total += 1 + extend(chosen + [s], k + 1)
        return total

    return extend([], 0)


def reference_inversion(lattice, cumulative):
    """Recursive Möbius inversion straight off the public order predicate."""
    atoms = lattice.atoms
    below = {
        i: [j for j in range(len(atoms)) if j != i and leq(atoms[j], atoms[i])]
        for i in range(len(atoms))
    }
    partial = {}

    def solve(i):
        if i not in partial:
            partial[i] = cumulative[i] - sum(solve(j) for j in below[i])
        return partial[i]

    return [solve(i) for i in range(len(atoms))]
