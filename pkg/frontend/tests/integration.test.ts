/** End-to-end against a live mediator: spawn the serve command on an
 * ephemeral port and drive it through the same client the page uses. */

import { spawn, type ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { OntologyIndex, emitQuery, structurallyEquivalent } from "../src/builder.js";
import { walkthroughState } from "./fixtures.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const repo = path.resolve(here, "..", "..");
const config = path.join(repo, "fixtures", "medley.cfg");
const walkthroughText = readFileSync(
  path.join(repo, "fixtures", "queries", "top3_phosphosites.cq"),
  "utf-8"
);

let proc: ChildProcess;
let client: ApiClient;

beforeAll(async () => {
  proc = spawn(
    "python3",
    ["-m", "medley.cli", "serve", "--config", config, "--port", "0"],
    { stdio: ["ignore", "pipe", "pipe"] }
  );
  const base = await new Promise<string>((resolve, reject) => {
    let out = "";
    proc.stdout!.on("data", (chunk: Buffer) => {
      out += chunk.toString();
      const m = out.match(/serving on (http:\/\/[\d.]+:\d+)/);
      if (m) resolve(m[1]);
    });
    proc.on("exit", (code) => reject(new Error(`mediator exited: ${code}`)));
    setTimeout(() => reject(new Error("mediator never announced a port")), 20000);
  });
  client = new ApiClient(base);
  for (let i = 0; i < 50; i++) {
    if (await client.health()) return;
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error("mediator never became healthy");
}, 30000);

afterAll(() => {
  proc?.kill();
});

describe("mediator integration", () => {
  it("answers the walkthrough query with provenance", async () => {
    const result = await client.query({ query: walkthroughText });
    expect(result).not.toBeNull();
    expect(result!.answer_vars).toEqual(["BR", "Ph"]);
    expect(result!.rows).toEqual([
      ["1648480", "Fhl1p-S323"],
      ["1648480", "Fhl1p-T739"],
      ["8422683", "Fhl1p-S323"],
      ["8422683", "Fhl1p-T739"],
    ]);
    const sources = result!.provenance.map((p) => p.source).sort();
    expect(sources).toEqual(["phosphogrid", "sgd", "yeastract"]);
    for (const rec of result!.provenance) {
      expect(rec.retrieved_at).toMatch(/^\d{4}-\d{2}-\d{2}T/);
    }
    expect(result!.diagnostics?.calls.length).toBe(6);
  });

  it("accepts the builder's emission and returns the same answers", async () => {
    const ontology = new OntologyIndex(await client.ontology());
    const emitted = emitQuery(walkthroughState(), ontology);
    expect(structurallyEquivalent(emitted, walkthroughText)).toBe(true);

    const result = await client.query({ query: emitted });
    expect(result!.rows).toEqual([
      ["1648480", "Fhl1p-S323"],
      ["1648480", "Fhl1p-T739"],
      ["8422683", "Fhl1p-S323"],
      ["8422683", "Fhl1p-T739"],
    ]);
    // every emission the builder produces validates server side
    expect(result!.query.startsWith("Ans(V3,V7) :- ")).toBe(true);
  });

  it("lists the registered sources for the builder's checkboxes", async () => {
    const sources = await client.sources();
    expect(sources.map((s) => s.name)).toEqual([
      "sgd",
      "yeastract",
      "mips",
      "biogrid",
      "phosphogrid",
    ]);
    const sgd = sources[0];
    expect(sgd.properties).toContain("hasBibRef");
  });

  it("does keyword search", async () => {
    const result = await client.query({ keyword: "TOP3" });
    expect(result!.rows).toEqual([["TOP3"]]);
  });

  it("surfaces stage-tagged errors", async () => {
    const err = await client
      .query({ query: "Ans(X) :- Protein(X)" })
      .catch((e) => e);
    expect(err.stage).toBe("parse");
    expect(err.status).toBe(400);

    const err2 = await client
      .query({ query: "Ans(X) :- Protein(X);", sources: ["kegg"] })
      .catch((e) => e);
    expect(err2.stage).toBe("directory");
  });
});
