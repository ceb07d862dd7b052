/**
 * Thin scripting bindings over the `gid` command line tool.
 *
 * Distributions load from JSON files or in-memory records with the same
 * validation rules as the core loader; decompositions run through the CLI's
 * JSON interface and come back as plain atom rows, bit-exact with what the
 * CLI prints. No lattice internals cross the boundary: atoms travel as
 * strings like `{X1}{X2,T}`.
 */
import { execFile } from "node:child_process";
import { mkdtemp, readFile, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";

const execFileAsync = promisify(execFile);

const NORMALIZATION_REJECT_TOL = 1e-6;

export type Measure =
  | "ped"
  | "kl"
  | "tc"
  | "xent"
  | "negent"
  | "oinfo"
  | "tse"
  | "pid";

export interface StateRecord {
  s: number[];
  p: number;
}

export interface DistributionData {
  variables: string[];
  cardinalities: number[];
  states: StateRecord[];
}

export interface BoundAtomRow {
  /** Atom in brace notation over the table's variable names. */
  atom: string;
  valueBits: number;
  /** Exact rational coefficient, for the weighted measures. */
  coefficient?: string;
}

export interface DecomposeOptions {
  /** Prior distribution for the two-table measures (`kl`, `xent`). */
  prior?: DistributionHandle;
  /** Target variable for `pid` (defaults to the last variable). */
  target?: string;
  form?: "conditional" | "joint";
  policy?: "error" | "jitter" | "restrict";
  jitterEps?: number;
  redundancy?: string;
}

export interface Report {
  measure: string;
  scalarBits: number;
  crosscheckBits: number;
  policy?: string;
  atoms: BoundAtomRow[];
}

export class BindingError extends Error {}

function cliCommand(): string[] {
  const override = process.env.GID_CLI;
  if (override && override.trim().length > 0) {
    return override.trim().split(/\s+/);
  }
  return ["gid"];
}

async function runCli(args: string[]): Promise<string> {
  const [command, ...prefix] = cliCommand();
  try {
    const { stdout } = await execFileAsync(command, [...prefix, ...args], {
      maxBuffer: 64 * 1024 * 1024,
    });
    return stdout;
  } catch (error) {
    const err = error as NodeJS.ErrnoException & { stderr?: string };
    if (err.code === "ENOENT") {
      throw new BindingError(
        `cannot find the gid CLI as ${command}; install the Python package or set GID_CLI`,
      );
    }
    const detail = err.stderr ? err.stderr.trim() : err.message;
    throw new BindingError(`gid ${args.join(" ")} failed: ${detail}`);
  }
}

/** Same checks the core loader applies, so bad tables fail before any CLI call. */
export function validateDistribution(data: DistributionData): void {
  const { variables, cardinalities, states } = data;
  if (!Array.isArray(variables) || variables.length === 0) {
    throw new BindingError("a table needs at least one variable");
  }
  for (const name of variables) {
    if (typeof name !== "string" || name.length === 0 || /[{},\s]/.test(name)) {
      throw new BindingError(
        `variable name ${JSON.stringify(name)} invalid: names must be nonempty ` +
          "and free of braces, commas and whitespace",
      );
    }
  }
  if (new Set(variables).size !== variables.length) {
    throw new BindingError(`duplicate variable names: ${variables.join(", ")}`);
  }
  if (!Array.isArray(cardinalities) || cardinalities.length !== variables.length) {
    throw new BindingError(
      `${variables.length} variable names but ${cardinalities?.length ?? 0} cardinalities`,
    );
  }
  for (const card of cardinalities) {
    if (!Number.isInteger(card) || card < 1) {
      throw new BindingError(`cardinalities must be positive integers: ${cardinalities}`);
    }
  }
  if (!Array.isArray(states)) {
    throw new BindingError("'states' must be a list of {s, p} records");
  }
  const seen = new Set<string>();
  let total = 0;
  let positive = 0;
  for (const record of states) {
    if (!record || !Array.isArray(record.s) || typeof record.p !== "number") {
      throw new BindingError(`malformed state record ${JSON.stringify(record)}`);
    }
    if (record.s.length !== variables.length) {
      throw new BindingError(
        `state ${JSON.stringify(record.s)} has ${record.s.length} coordinates, ` +
          `expected ${variables.length}`,
      );
    }
    record.s.forEach((value, i) => {
      if (!Number.isInteger(value) || value < 0 || value >= cardinalities[i]) {
        throw new BindingError(
          `state ${JSON.stringify(record.s)}: coordinate ${i} = ${value} outside ` +
            `[0, ${cardinalities[i]})`,
        );
      }
    });
    if (!Number.isFinite(record.p) || record.p < 0) {
      throw new BindingError(
        `state ${JSON.stringify(record.s)}: probability ${record.p} is not a ` +
          "finite non-negative real",
      );
    }
    const key = record.s.join(",");
    if (seen.has(key)) {
      throw new BindingError(`duplicate state (${key})`);
    }
    seen.add(key);
    total += record.p;
    if (record.p > 0) {
      positive += 1;
    }
  }
  if (Math.abs(total - 1) > NORMALIZATION_REJECT_TOL) {
    throw new BindingError(
      `probabilities sum to ${total}, not 1 (tolerance ${NORMALIZATION_REJECT_TOL})`,
    );
  }
  if (positive === 0) {
    throw new BindingError("empty support: all probabilities are zero");
  }
}

export class DistributionHandle {
  readonly data: DistributionData;

  constructor(data: DistributionData) {
    validateDistribution(data);
    this.data = data;
  }

  get variables(): string[] {
    return [...this.data.variables];
  }

  get n(): number {
    return this.data.variables.length;
  }
}

/** Load a distribution from a JSON file path or from in-memory records. */
export async function load(
  source: string | DistributionData,
): Promise<DistributionHandle> {
  if (typeof source === "string") {
    let text: string;
    try {
      text = await readFile(source, "utf8");
    } catch (error) {
      throw new BindingError(`cannot read ${source}: ${(error as Error).message}`);
    }
    let parsed: DistributionData;
    try {
      parsed = JSON.parse(text) as DistributionData;
    } catch (error) {
      throw new BindingError(`${source}: invalid JSON (${(error as Error).message})`);
    }
    return new DistributionHandle(parsed);
  }
  return new DistributionHandle(source);
}

async function withTempTables<T>(
  tables: DistributionHandle[],
  action: (paths: string[]) => Promise<T>,
): Promise<T> {
  const dir = await mkdtemp(join(tmpdir(), "gid-bindings-"));
  try {
    const paths: string[] = [];
    for (const [index, handle] of tables.entries()) {
      const path = join(dir, `table-${index}.json`);
      await writeFile(path, JSON.stringify(handle.data));
      paths.push(path);
    }
    return await action(paths);
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

function parseReport(stdout: string): Report {
  const payload = JSON.parse(stdout) as {
    measure: string;
    scalar_bits: number;
    crosscheck_bits: number;
    policy?: string;
    atoms: { atom: string; value_bits: number; coefficient?: string }[];
  };
  return {
    measure: payload.measure,
    scalarBits: payload.scalar_bits,
    crosscheckBits: payload.crosscheck_bits,
    policy: payload.policy,
    atoms: payload.atoms.map((row) => {
      const bound: BoundAtomRow = { atom: row.atom, valueBits: row.value_bits };
      if (row.coefficient !== undefined) {
        bound.coefficient = row.coefficient;
      }
      return bound;
    }),
  };
}

/** Run one measure through the CLI and return the full parsed report. */
export async function report(
  handle: DistributionHandle,
  measure: Measure,
  options: DecomposeOptions = {},
): Promise<Report> {
  const twoTable = measure === "kl" || measure === "xent";
  if (twoTable && !options.prior) {
    throw new BindingError(`measure ${measure} needs options.prior`);
  }
  const tables = twoTable
    ? [handle, options.prior as DistributionHandle]
    : [handle];
  return withTempTables(tables, async (paths) => {
    const args: string[] = [measure, ...paths, "--format", "json"];
    if (options.redundancy) {
      args.push("--redundancy", options.redundancy);
    }
    if (twoTable && options.policy) {
      args.push("--policy", options.policy);
      if (options.jitterEps !== undefined) {
        args.push("--jitter-eps", String(options.jitterEps));
      }
    }
    if (measure === "pid") {
      args.push("--target", options.target ?? handle.variables[handle.n - 1]);
      args.push("--form", options.form ?? "conditional");
    }
    return parseReport(await runCli(args));
  });
}

/** Decompose a distribution; the rows mirror the CLI's JSON output exactly. */
export async function decompose(
  handle: DistributionHandle,
  measure: Measure,
  options: DecomposeOptions = {},
): Promise<BoundAtomRow[]> {
  return (await report(handle, measure, options)).atoms;
}

export interface CorpusOptions {
  n?: number;
  seed?: number;
}

/** Generate one of the canonical distributions (xor, and, or, copy, parity, uniform, random). */
export async function corpus(
  name: string,
  options: CorpusOptions = {},
): Promise<DistributionHandle> {
  const args = ["corpus", name];
  if (options.n !== undefined) {
    args.push("--n", String(options.n));
  }
  if (options.seed !== undefined) {
    args.push("--seed", String(options.seed));
  }
  const stdout = await runCli(args);
  return new DistributionHandle(JSON.parse(stdout) as DistributionData);
}

/** Number of lattice atoms for n variables (1, 4, 18, 166, 7579, ...). */
export async function latticeSize(n: number): Promise<number> {
  const stdout = await runCli(["lattice", "--n", String(n), "--format", "json"]);
  const payload = JSON.parse(stdout) as { atom_count: number };
  return payload.atom_count;
}
