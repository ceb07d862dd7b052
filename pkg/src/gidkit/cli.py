"""Command-line interface: load distribution files, run decompositions, emit
deterministic TSV or JSON reports.

Identical invocations produce byte-identical output: atom rows are printed in
canonical lattice order and every value is normalized to 12 significant
digits.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import measures
from .corpus import GateSpec, make_gate
from .distributions import (
    DistributionError,
    JointTable,
    dumps_table,
    load_table,
)
from .divergence import partial_kl
from .lattice import (
    LatticeCapError,
    build_lattice,
    format_atom,
    format_value,
)
from .measures import AtomRow, MeasureReport
from .redundancy import REDUNDANCY_FUNCTIONS, entropy, expected_ped


@dataclass
class RunConfig:
    """Everything one invocation needs, assembled from the parsed arguments."""

    command: str
    inputs: tuple[Path, ...] = ()
    redundancy: str = "h_min"
    base: float = 2.0
    policy: str = "error"
    jitter_eps: float = 1e-6
    fmt: str = "tsv"
    jobs: int = 1
    target: str | None = None
    form: str = "conditional"
    gate: str | None = None
    n: int | None = None
    seed: int | None = None
    out: Path | None = None


def _unit_scale(base: float) -> float:
    if base == 2.0:
        return 1.0
    if base <= 0 or base == 1.0:
        raise DistributionError(f"log base must be positive and != 1, got {base}")
    return 1.0 / math.log2(base)


def _fraction_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_report(report: MeasureReport, fmt: str, scale: float = 1.0) -> str:
    has_coeffs = any(row.coefficient is not None for row in report.rows)
    if fmt == "json":
        payload: dict = {
            "measure": report.measure,
            "scalar_bits": json_value(report.scalar_bits * scale),
            "crosscheck_bits": json_value(report.crosscheck_bits * scale),
        }
        if report.policy is not None:
            payload["policy"] = report.policy
        if report.posterior_id is not None:
            payload["posterior"] = report.posterior_id
        if report.prior_id is not None:
            payload["prior"] = report.prior_id
        atoms = []
        for row in report.rows:
            entry: dict = {"atom": format_atom(row.atom, report.names)}
            if has_coeffs:
                entry["coefficient"] = _fraction_str(row.coefficient)
            entry["value_bits"] = json_value(row.value_bits * scale)
            atoms.append(entry)
        payload["atoms"] = atoms
        return json.dumps(payload, indent=2) + "\n"

    lines = [f"# measure\t{report.measure}"]
    lines.append(f"# scalar_bits\t{format_value(report.scalar_bits * scale)}")
    lines.append(f"# crosscheck_bits\t{format_value(report.crosscheck_bits * scale)}")
    if report.policy is not None:
        lines.append(f"# policy\t{report.policy}")
    if report.posterior_id is not None:
        lines.append(f"# posterior\t{report.posterior_id}")
    if report.prior_id is not None:
        lines.append(f"# prior\t{report.prior_id}")
    if has_coeffs:
        lines.append("atom\tcoefficient\tvalue_bits")
        for row in report.rows:
            lines.append(
                f"{format_atom(row.atom, report.names)}\t"
                f"{_fraction_str(row.coefficient)}\t{format_value(row.value_bits * scale)}"
            )
    else:
        lines.append("atom\tvalue_bits")
        for row in report.rows:
            lines.append(
                f"{format_atom(row.atom, report.names)}\t{format_value(row.value_bits * scale)}"
            )
    return "\n".join(lines) + "\n"


def json_value(v: float) -> float:
    """Round-trip through the printed 12-significant-digit form."""
    return float(format_value(v))


def _scalar_report(measure: str, scalar: float, crosscheck: float, dist: JointTable) -> MeasureReport:
    return MeasureReport(
        measure=measure,
        scalar_bits=scalar,
        crosscheck_bits=crosscheck,
        rows=(),
        names=dist.variable_names,
        posterior_id=dist.label(),
    )


def _run(config: RunConfig) -> str:
    fn = REDUNDANCY_FUNCTIONS.get(config.redundancy)
    if fn is None:
        raise DistributionError(
            f"unknown redundancy function {config.redundancy!r}; "
            f"available: {sorted(REDUNDANCY_FUNCTIONS)}"
        )
    scale = _unit_scale(config.base)
    cmd = config.command

    if cmd == "lattice":
        lattice = build_lattice(config.n)
        strings = [format_atom(a) for a in lattice.atoms]
        if config.fmt == "json":
            return json.dumps(
                {"n": lattice.n, "atom_count": len(lattice.atoms), "atoms": strings},
                indent=2,
            ) + "\n"
        lines = [f"# n\t{lattice.n}", f"# atom_count\t{len(lattice.atoms)}"]
        lines.extend(strings)
        return "\n".join(lines) + "\n"

    if cmd == "corpus":
        table = make_gate(GateSpec(config.gate, n=config.n, seed=config.seed))
        return dumps_table(table) + "\n"

    if cmd == "ped":
        dist = load_table(config.inputs[0])
        table = expected_ped(dist, fn=fn, jobs=config.jobs)
        if config.fmt == "json":
            report = MeasureReport(
                measure="ped",
                scalar_bits=table.total(),
                crosscheck_bits=entropy(dist),
                rows=tuple(AtomRow(a, v) for a, v in table.items()),
                names=dist.variable_names,
                posterior_id=dist.label(),
            )
            return render_report(report, "json", scale)
        lines = ["atom\tvalue_bits"]
        for text, v in zip(table.atom_strings(), table.values):
            lines.append(f"{text}\t{format_value(float(v) * scale)}")
        return "\n".join(lines) + "\n"

    if cmd == "kl":
        posterior = load_table(config.inputs[0])
        prior = load_table(config.inputs[1])
        result = partial_kl(
            posterior,
            prior,
            fn=fn,
            policy=config.policy,
            jitter_eps=config.jitter_eps,
            jobs=config.jobs,
        )
        report = MeasureReport(
            measure="kl",
            scalar_bits=result.atoms.total(),
            crosscheck_bits=result.total_bits,
            rows=tuple(AtomRow(a, v) for a, v in result.atoms.items()),
            names=result.atoms.display_names(),
            policy=result.policy,
            posterior_id=result.posterior_id,
            prior_id=result.prior_id,
        )
        return render_report(report, config.fmt, scale)

    if cmd == "xent":
        posterior = load_table(config.inputs[0])
        prior = load_table(config.inputs[1])
        report = measures.cross_entropy_decomposition(
            posterior,
            prior,
            fn=fn,
            policy=config.policy,
            jitter_eps=config.jitter_eps,
            jobs=config.jobs,
        )
        return render_report(report, config.fmt, scale)

    dist = load_table(config.inputs[0])
    if cmd == "tc":
        report = measures.tc_decomposition(dist, fn=fn, jobs=config.jobs)
    elif cmd == "negent":
        report = measures.negentropy_decomposition(dist, fn=fn, jobs=config.jobs)
    elif cmd == "oinfo":
        if dist.n == 3:
            report = measures.o_information_atoms(dist, fn=fn, jobs=config.jobs)
        else:
            value = measures.o_information(dist)
            report = _scalar_report("oinfo", value, value, dist)
    elif cmd == "tse":
        if dist.n == 3:
            report = measures.tse_atoms(dist, fn=fn, jobs=config.jobs)
        else:
            value = measures.tse(dist)
            report = _scalar_report("tse", value, value, dist)
    elif cmd == "pid":
        target = config.target if config.target is not None else dist.variable_names[-1]
        if config.form == "conditional":
            report = measures.pid_conditional(dist, target, fn=fn)
        else:
            report = measures.pid_joint(dist, target, fn=fn)
    else:  # pragma: no cover - argparse restricts choices
        raise DistributionError(f"unknown command {cmd!r}")
    return render_report(report, config.fmt, scale)


def run(config: RunConfig) -> int:
    """Execute one configured invocation; returns the process exit code."""
    try:
        text = _run(config)
    except (DistributionError, LatticeCapError, OSError, ValueError) as exc:
        print(f"gid: error: {exc}", file=sys.stderr)
        return 1
    if config.out is not None:
        Path(config.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _add_common(parser: argparse.ArgumentParser, policy: bool = False) -> None:
    parser.add_argument("--format", choices=("tsv", "json"), default="tsv", help="output format")
    parser.add_argument("--redundancy", default="h_min", help="redundancy function name")
    parser.add_argument("--base", type=float, default=2.0, help="log base for reported values")
    parser.add_argument("--jobs", type=int, default=1, help="parallelism degree for state loops")
    parser.add_argument("--out", type=Path, default=None, help="write output to a file instead of stdout")
    if policy:
        parser.add_argument(
            "--policy",
            choices=("error", "jitter", "restrict"),
            default="error",
            help="what to do when the posterior leaves the prior's support",
        )
        parser.add_argument(
            "--jitter-eps", type=float, default=1e-6, help="epsilon for the jitter policy"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gid",
        description="Decompose entropy and information gain over the antichain lattice.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ped", help="expected partial entropy decomposition of one table")
    p.add_argument("dist", type=Path)
    _add_common(p)

    p = sub.add_parser("kl", help="decompose the KL divergence from a prior to a posterior")
    p.add_argument("posterior", type=Path)
    p.add_argument("prior", type=Path)
    _add_common(p, policy=True)

    p = sub.add_parser("tc", help="decompose the total correlation of one table")
    p.add_argument("dist", type=Path)
    _add_common(p)

    p = sub.add_parser("xent", help="decompose the cross entropy of a posterior under a prior")
    p.add_argument("posterior", type=Path)
    p.add_argument("prior", type=Path)
    _add_common(p, policy=True)

    p = sub.add_parser("negent", help="decompose the negentropy of one table")
    p.add_argument("dist", type=Path)
    _add_common(p)

    p = sub.add_parser("oinfo", help="O-information (atom form for 3 variables)")
    p.add_argument("dist", type=Path)
    _add_common(p)

    p = sub.add_parser("tse", help="TSE complexity (atom form for 3 variables)")
    p.add_argument("dist", type=Path)
    _add_common(p)

    p = sub.add_parser("pid", help="single-target decomposition of a 3-variable table")
    p.add_argument("dist", type=Path)
    p.add_argument("--target", default=None, help="target variable name (default: last)")
    p.add_argument("--form", choices=("conditional", "joint"), default="conditional")
    _add_common(p)

    p = sub.add_parser("corpus", help="emit a canonical distribution as JSON")
    p.add_argument("gate", help="XOR, AND, OR, COPY, PARITY, UNIFORM or RANDOM")
    p.add_argument("--n", type=int, default=None, help="size parameter where applicable")
    p.add_argument("--seed", type=int, default=None, help="seed for RANDOM")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("lattice", help="print the atom count and atoms for n variables")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--out", type=Path, default=None)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    inputs = []
    for attr in ("dist", "posterior", "prior"):
        value = getattr(args, attr, None)
        if value is not None:
            inputs.append(value)
    return RunConfig(
        command=args.command,
        inputs=tuple(inputs),
        redundancy=getattr(args, "redundancy", "h_min"),
        base=getattr(args, "base", 2.0),
        policy=getattr(args, "policy", "error"),
        jitter_eps=getattr(args, "jitter_eps", 1e-6),
        fmt=getattr(args, "format", "tsv"),
        jobs=getattr(args, "jobs", 1),
        target=getattr(args, "target", None),
        form=getattr(args, "form", "conditional"),
        gate=getattr(args, "gate", None),
        n=getattr(args, "n", None),
        seed=getattr(args, "seed", None),
        out=getattr(args, "out", None),
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
