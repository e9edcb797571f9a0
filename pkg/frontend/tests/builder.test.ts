import { describe, expect, it } from "vitest";

import {
  OntologyIndex,
  emitQuery,
  emitQueryWithMeta,
  parseQueryText,
  quoteConstant,
  sourceWarnings,
  structurallyEquivalent,
  validateState,
  type BuilderState,
} from "../src/builder.js";
import { ONTOLOGY, SOURCES, WALKTHROUGH_LISTING, walkthroughState } from "./fixtures.js";

const index = new OntologyIndex(ONTOLOGY);

describe("ontology index", () => {
  it("subclass checks are reflexive and transitive", () => {
    expect(index.isSubclassOf("Protein", "Protein")).toBe(true);
    expect(index.isSubclassOf("TranscriptionFactor", "BioEntity")).toBe(true);
    expect(index.isSubclassOf("Protein", "TranscriptionFactor")).toBe(false);
    expect(index.isSubclassOf("BibRef", "BioEntity")).toBe(false);
  });

  it("offers inherited datatype properties", () => {
    expect(index.datatypePropertiesFor("TranscriptionFactor")).toEqual([
      "hasDescription",
      "hasName",
      "hasSystematicName",
    ]);
    expect(index.datatypePropertiesFor("BibRef")).toEqual([]);
  });

  it("offers object properties by domain and classes by range", () => {
    expect(index.objectPropertiesFor("Protein")).toEqual(["hasBibRef", "regulatedBy"]);
    expect(index.objectPropertiesFor("TranscriptionFactor")).toEqual([
      "belongsTo",
      "hasBibRef",
      "hasPhosphoSite",
      "regulatedBy",
    ]);
    expect(index.rangeClassesFor("regulatedBy")).toEqual(["TranscriptionFactor"]);
    expect(index.rangeClassesFor("hasBibRef")).toEqual(["BibRef"]);
  });
});

describe("emission", () => {
  it("emits the walkthrough query with deterministic V-numbering", () => {
    const text = emitQuery(walkthroughState(), index);
    expect(text).toBe(
      'Ans(V3,V7) :- Protein(V1), hasDescription(V1,"DNA Topoisomerase III"), ' +
        "hasSystematicName(V1,V2), hasBibRef(V1,V3), BibRef(V3), " +
        "regulatedBy(V1,V4), TranscriptionFactor(V4), hasName(V4,V5), " +
        'belongsTo(V4,V6), Chromosome(V6), hasName(V6,"XVI"), ' +
        "hasPhosphoSite(V4,V7), PhosphoSite(V7);"
    );
    expect(emitQuery(walkthroughState(), index)).toBe(text);
  });

  it("matches the hand-written walkthrough listing structurally", () => {
    const text = emitQuery(walkthroughState(), index);
    expect(structurallyEquivalent(text, WALKTHROUGH_LISTING)).toBe(true);
  });

  it("reports answer column origins", () => {
    const emission = emitQueryWithMeta(walkthroughState(), index);
    expect(emission.answers.map((a) => a.kind)).toEqual(["concept", "concept"]);
    expect(emission.answers[0].path).toEqual([2]);
    expect(emission.answers[1].path).toEqual([3, 2]);
  });

  it("doubles quotes inside constants", () => {
    expect(quoteConstant('say "hi"')).toBe('"say ""hi"""');
    const state: BuilderState = {
      sources: [],
      root: {
        className: "Protein",
        answer: true,
        criteria: [
          { kind: "datatype", property: "hasName", constant: 'a"b', answer: false },
        ],
      },
    };
    expect(emitQuery(state, index)).toBe('Ans(V1) :- Protein(V1), hasName(V1,"a""b");');
  });
});

describe("validation", () => {
  it("accepts the walkthrough state", () => {
    expect(validateState(walkthroughState(), index)).toEqual([]);
  });

  it("requires a constant somewhere", () => {
    const state: BuilderState = {
      sources: [],
      root: { className: "Protein", answer: true, criteria: [] },
    };
    const problems = validateState(state, index);
    expect(problems.some((p) => p.message.includes("fixed value"))).toBe(true);
    expect(() => emitQuery(state, index)).toThrow(/fixed value/);
  });

  it("requires at least one answer column", () => {
    const state = walkthroughState();
    const visitAll = (node: any): void => {
      node.answer = false;
      for (const c of node.criteria) {
        if (c.kind === "datatype") c.answer = false;
        else visitAll(c.child);
      }
    };
    visitAll(state.root);
    const problems = validateState(state, index);
    expect(problems.map((p) => p.message)).toContain("pick at least one answer column");
  });

  it("anchors problems to the offending row", () => {
    const state = walkthroughState();
    const root = state.root!;
    (root.criteria[0] as any).constant = "   ";
    const problems = validateState(state, index);
    const empty = problems.find((p) => p.message.includes("empty"));
    expect(empty?.path).toEqual([0]);
  });

  it("rejects properties outside the concept's domain", () => {
    const state: BuilderState = {
      sources: [],
      root: {
        className: "Protein",
        answer: true,
        criteria: [
          { kind: "datatype", property: "hasFunction", constant: "x", answer: false },
        ],
      },
    };
    const problems = validateState(state, index);
    expect(problems[0].message).toContain("hasFunction does not apply to Protein");
  });
});

describe("source warnings", () => {
  it("stays quiet when every source is selected", () => {
    expect(sourceWarnings(walkthroughState(), SOURCES)).toEqual([]);
  });

  it("flags criteria whose property no selected source stores", () => {
    const state = walkthroughState();
    state.sources = ["sgd", "mips", "biogrid", "phosphogrid"]; // yeastract off
    const warnings = sourceWarnings(state, SOURCES);
    const paths = warnings.map((w) => w.path.join("."));
    expect(paths).toContain("3"); // regulatedBy
    expect(paths).toContain("3.1"); // belongsTo under the TF block
    expect(warnings.every((w) => w.message.includes("no selected source"))).toBe(true);
    expect(paths).not.toContain("2"); // hasBibRef still stored by sgd
  });
});

describe("query text helpers", () => {
  it("parses both arrow spellings and comments", () => {
    const a = parseQueryText('# note\nAns(X) :- Protein(X), hasName(X,"n");');
    const b = parseQueryText('Ans(X) := Protein(X), hasName(X,"n");');
    expect(a.atoms).toEqual(b.atoms);
    expect(a.answerVars).toEqual(["X"]);
    expect(a.atoms[1].args[1]).toEqual({ kind: "const", value: "n" });
  });

  it("parses doubled quotes and punctuation inside constants", () => {
    const q = parseQueryText('Ans(X) :- p(X,"a(b, c)""d");');
    expect(q.atoms[0].args[1].value).toBe('a(b, c)"d');
  });

  it("accepts renamings but not different shapes", () => {
    const base = 'Ans(X) :- Protein(X), hasName(X,"n"), regulatedBy(X,Y);';
    expect(
      structurallyEquivalent(base, 'Ans(A) :- regulatedBy(A,B), Protein(A), hasName(A,"n");')
    ).toBe(true);
    expect(
      structurallyEquivalent(base, 'Ans(X) :- Protein(X), hasName(X,"m"), regulatedBy(X,Y);')
    ).toBe(false);
    expect(
      structurallyEquivalent(base, base + " ".replace(";", "") /* same text */)
    ).toBe(true);
    expect(structurallyEquivalent(base, 'Ans(Y) :- Protein(X), hasName(X,"n"), regulatedBy(X,Y);')).toBe(false);
  });

  it("respects variable injectivity", () => {
    expect(
      structurallyEquivalent("Ans(X) :- interactsWith(X,X);", "Ans(X) :- interactsWith(X,Y);")
    ).toBe(false);
    expect(
      structurallyEquivalent(
        "Ans(X) :- interactsWith(X,Y), interactsWith(Y,X);",
        "Ans(A) :- interactsWith(B,A), interactsWith(A,B);"
      )
    ).toBe(true);
  });

  it("compares answer tuples positionally", () => {
    expect(
      structurallyEquivalent(
        "Ans(X,Y) :- interactsWith(X,Y);",
        "Ans(B,A) :- interactsWith(A,B);"
      )
    ).toBe(false);
  });
});
