#!/usr/bin/env python3
"""Seeded search for prior/posterior pairs whose decomposition has a clearly
negative atom.

Individual atoms of a divergence decomposition may be negative even though the
total never is; this script documents how the regression fixture frozen in
tests/test_divergence.py was found, and can hunt for stronger examples.
"""
import argparse

from gidkit import format_atom, gate, partial_kl


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--threshold", type=float, default=-0.05, help="report atoms below this")
    parser.add_argument("--seeds", type=int, default=500, help="number of seed pairs to try")
    parser.add_argument("--prior-offset", type=int, default=20_000)
    parser.add_argument("--first-only", action="store_true", help="stop at the first hit")
    args = parser.parse_args()

    hits = 0
    for seed in range(args.seeds):
        posterior = gate("random", n=3, seed=seed)
        prior = gate("random", n=3, seed=args.prior_offset + seed)
        result = partial_kl(posterior, prior)
        values = list(result.atoms.values)
        lowest = min(values)
        if lowest < args.threshold:
            atom = result.atoms.lattice.atoms[values.index(lowest)]
            print(
                f"seeds ({seed}, {args.prior_offset + seed}): "
                f"{format_atom(atom, posterior.variable_names)} = {lowest:.12g}, "
                f"total = {result.total_bits:.12g}"
            )
            hits += 1
            if args.first_only:
                break
    print(f"{hits} pair(s) below {args.threshold} out of {args.seeds} tried")


if __name__ == "__main__":
    main()
