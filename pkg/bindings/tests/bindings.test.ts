import { mkdtemp, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import {
  BindingError,
  corpus,
  decompose,
  latticeSize,
  load,
  report,
  type DistributionData,
} from "../src/index.js";

let dir: string;

beforeAll(async () => {
  dir = await mkdtemp(join(tmpdir(), "gid-bindings-test-"));
});

afterAll(async () => {
  await rm(dir, { recursive: true, force: true });
});

const XOR: DistributionData = {
  variables: ["X1", "X2", "T"],
  cardinalities: [2, 2, 2],
  states: [
    { s: [0, 0, 0], p: 0.25 },
    { s: [0, 1, 1], p: 0.25 },
    { s: [1, 0, 1], p: 0.25 },
    { s: [1, 1, 0], p: 0.25 },
  ],
};

describe("load", () => {
  it("loads a file into a handle", async () => {
    const path = join(dir, "xor.json");
    await writeFile(path, JSON.stringify(XOR));
    const handle = await load(path);
    expect(handle.n).toBe(3);
    expect(handle.variables).toEqual(["X1", "X2", "T"]);
  });

  it("loads records directly", async () => {
    const handle = await load(XOR);
    expect(handle.n).toBe(3);
  });

  it("rejects malformed probabilities", async () => {
    const bad = structuredClone(XOR);
    bad.states[0].p = 0.9; // sums to 1.65
    await expect(load(bad)).rejects.toThrow(BindingError);
    const negative = structuredClone(XOR);
    negative.states[0].p = -0.25;
    await expect(load(negative)).rejects.toThrow(/non-negative/);
  });

  it("rejects duplicate states and bad coordinates", async () => {
    const dup = structuredClone(XOR);
    dup.states[1] = { s: [0, 0, 0], p: 0.25 };
    await expect(load(dup)).rejects.toThrow(/duplicate state/);
    const outOfRange = structuredClone(XOR);
    outOfRange.states[0] = { s: [0, 0, 2], p: 0.25 };
    await expect(load(outOfRange)).rejects.toThrow(/outside/);
  });

  it("rejects names that cannot appear in atom strings", async () => {
    const bad = structuredClone(XOR);
    bad.variables = ["X1", "X,2", "T"];
    await expect(load(bad)).rejects.toThrow(/variable name/);
  });

  it("round-trips: records and file give identical decompositions", async () => {
    const path = join(dir, "xor-rt.json");
    await writeFile(path, JSON.stringify(XOR));
    const fromFile = await decompose(await load(path), "tc");
    const fromRecords = await decompose(await load(XOR), "tc");
    expect(fromRecords).toEqual(fromFile);
  });
});

describe("decompose", () => {
  it("tc of the xor gate puts the whole bit on the top atom", async () => {
    const rows = await decompose(await load(XOR), "tc");
    expect(rows.length).toBe(18);
    const byAtom = new Map(rows.map((r) => [r.atom, r.valueBits]));
    expect(byAtom.get("{X1,X2,T}")).toBe(1);
    for (const [atom, value] of byAtom) {
      if (atom !== "{X1,X2,T}") {
        expect(value).toBe(0);
      }
    }
  });

  it("ped of the uniform prior spreads one bit across three atoms", async () => {
    const uniform = await corpus("uniform", { n: 3 });
    const rows = await decompose(uniform, "ped");
    const byAtom = new Map(rows.map((r) => [r.atom, r.valueBits]));
    expect(byAtom.get("{X1}{X2}{X3}")).toBe(1);
    expect(byAtom.get("{X1,X2}{X1,X3}{X2,X3}")).toBe(1);
    expect(byAtom.get("{X1,X2,X3}")).toBe(1);
  });

  it("oinfo of the xor gate is -1", async () => {
    const result = await report(await load(XOR), "oinfo");
    expect(result.scalarBits).toBe(-1);
    expect(result.crosscheckBits).toBe(-1);
  });

  it("kl needs a prior", async () => {
    await expect(decompose(await load(XOR), "kl")).rejects.toThrow(/prior/);
  });

  it("surfaces CLI errors (support violation)", async () => {
    const uniform = await corpus("uniform", { n: 3 });
    const prior = await load(XOR);
    const posterior = await load({
      ...uniform.data,
      variables: ["X1", "X2", "T"],
    });
    await expect(decompose(posterior, "kl", { prior })).rejects.toThrow(
      /outside prior support/,
    );
  });
});

describe("corpus and latticeSize", () => {
  it("builds gates by name", async () => {
    const anda = await corpus("and");
    expect(anda.variables).toEqual(["X1", "X2", "T"]);
    expect(anda.data.states.length).toBe(4);
  });

  it("random tables are seeded", async () => {
    const a = await corpus("random", { n: 3, seed: 5 });
    const b = await corpus("random", { n: 3, seed: 5 });
    expect(a.data).toEqual(b.data);
  });

  it("reports the known atom counts", async () => {
    expect(await latticeSize(1)).toBe(1);
    expect(await latticeSize(2)).toBe(4);
    expect(await latticeSize(3)).toBe(18);
    expect(await latticeSize(4)).toBe(166);
  });
});
