/** Query-builder model: a concept tree that emits conjunctive query
 * text. All integration logic lives on the server; this module only
 * assembles text the mediator will parse, so its own checks are limited
 * to what makes a query plannable at all (a constant somewhere, answers
 * picked, classes matching property domains).
 *
 * Variables are named V1..Vn in builder order so the emitted text is
 * deterministic; equivalence with hand-written queries is checked
 * structurally (variable bijection + atom multiset), not textually.
 */

import type { OntologyInfo, SourceInfo } from "./types.js";

// ----------------------------------------------------------- ontology

export class OntologyIndex {
  private parents = new Map<string, string | null>();

  constructor(public readonly info: OntologyInfo) {
    for (const c of info.classes) this.parents.set(c.name, c.parent);
  }

  classNames(): string[] {
    return this.info.classes.map((c) => c.name);
  }

  /** sub == sup counts; walks parent links otherwise. */
  isSubclassOf(sub: string, sup: string): boolean {
    let cur: string | null | undefined = sub;
    while (cur != null) {
      if (cur === sup) return true;
      cur = this.parents.get(cur);
      if (cur === undefined) return false;
    }
    return false;
  }

  datatypePropertiesFor(className: string): string[] {
    return this.info.datatype_properties
      .filter((p) => this.isSubclassOf(className, p.domain))
      .map((p) => p.name);
  }

  objectPropertiesFor(className: string): string[] {
    return this.info.object_properties
      .filter((p) => this.isSubclassOf(className, p.domain))
      .map((p) => p.name);
  }

  /** Classes a child concept under `property` may take: the declared
   * range and its subclasses. */
  rangeClassesFor(property: string): string[] {
    const op = this.info.object_properties.find((p) => p.name === property);
    if (!op) return [];
    return this.classNames().filter((c) => this.isSubclassOf(c, op.range));
  }
}

// ------------------------------------------------------ builder state

export interface DatatypeCriterion {
  kind: "datatype";
  property: string;
  /** null means "bind a variable", otherwise an exact-match constant */
  constant: string | null;
  answer: boolean;
}

export interface ObjectCriterion {
  kind: "object";
  property: string;
  child: ConceptNode;
}

export type Criterion = DatatypeCriterion | ObjectCriterion;

export interface ConceptNode {
  className: string;
  answer: boolean;
  criteria: Criterion[];
}

export interface BuilderState {
  sources: string[]; // selected source names; empty list = all
  root: ConceptNode | null;
}

export function newConcept(className: string): ConceptNode {
  return { className, answer: false, criteria: [] };
}

export function emptyState(): BuilderState {
  return { sources: [], root: null };
}

// -------------------------------------------------------- validation

export interface BuilderProblem {
  message: string;
  /** path of criterion indices from the root; [] is the root itself */
  path: number[];
}

export function validateState(
  state: BuilderState,
  ontology: OntologyIndex
): BuilderProblem[] {
  const problems: BuilderProblem[] = [];
  if (!state.root) {
    return [{ message: "pick a concept to start from", path: [] }];
  }
  let constants = 0;
  let answers = 0;

  const visit = (node: ConceptNode, path: number[]): void => {
    if (node.answer) answers += 1;
    node.criteria.forEach((criterion, i) => {
      const here = [...path, i];
      if (criterion.kind === "datatype") {
        if (criterion.constant !== null) {
          if (criterion.constant.trim() === "") {
            problems.push({ message: "constant must not be empty", path: here });
          } else {
            constants += 1;
          }
        }
        if (criterion.answer && criterion.constant !== null) {
          problems.push({
            message: "a fixed value cannot also be an answer column",
            path: here,
          });
        }
        if (criterion.answer) answers += 1;
        if (!ontology.datatypePropertiesFor(node.className).includes(criterion.property)) {
          problems.push({
            message: `${criterion.property} does not apply to ${node.className}`,
            path: here,
          });
        }
      } else {
        if (!ontology.objectPropertiesFor(node.className).includes(criterion.property)) {
          problems.push({
            message: `${criterion.property} does not apply to ${node.className}`,
            path: here,
          });
        }
        visit(criterion.child, here);
      }
    });
  };
  visit(state.root, []);

  if (constants === 0) {
    problems.push({
      message: "add at least one fixed value; the mediator cannot plan without one",
      path: [],
    });
  }
  if (answers === 0) {
    problems.push({ message: "pick at least one answer column", path: [] });
  }
  return problems;
}

/** Criterion paths whose property no registered-and-selected source
 * stores. Selecting no sources means "all", which never warns. */
export function sourceWarnings(
  state: BuilderState,
  sources: SourceInfo[]
): BuilderProblem[] {
  if (!state.root || state.sources.length === 0) return [];
  const selected = new Set(state.sources);
  const offered = new Map<string, Set<string>>();
  for (const s of sources) {
    for (const p of s.properties) {
      if (!offered.has(p)) offered.set(p, new Set());
      offered.get(p)!.add(s.name);
    }
  }
  const warnings: BuilderProblem[] = [];
  const visit = (node: ConceptNode, path: number[]): void => {
    node.criteria.forEach((criterion, i) => {
      const here = [...path, i];
      const stores = offered.get(criterion.property) ?? new Set<string>();
      if (![...stores].some((name) => selected.has(name))) {
        warnings.push({
          message: `no selected source stores ${criterion.property}`,
          path: here,
        });
      }
      if (criterion.kind === "object") visit(criterion.child, here);
    });
  };
  visit(state.root, []);
  return warnings;
}

// ---------------------------------------------------------- emission

export function quoteConstant(value: string): string {
  return '"' + value.replace(/"/g, '""') + '"';
}

export interface AnswerMeta {
  variable: string;
  /** criterion path for value columns, concept path for individuals */
  path: number[];
  kind: "concept" | "value";
}

export interface Emission {
  text: string;
  answers: AnswerMeta[];
}

/** Serialize the concept tree to query text with V1..Vn variables.
 * Throws if validateState reports problems. */
export function emitQueryWithMeta(
  state: BuilderState,
  ontology: OntologyIndex
): Emission {
  const problems = validateState(state, ontology);
  if (problems.length > 0) {
    throw new Error(problems[0].message);
  }
  const root = state.root!;
  let counter = 0;
  const fresh = (): string => `V${++counter}`;
  const atoms: string[] = [];
  const answers: AnswerMeta[] = [];

  const visit = (node: ConceptNode, variable: string, path: number[]): void => {
    atoms.push(`${node.className}(${variable})`);
    if (node.answer) answers.push({ variable, path, kind: "concept" });
    node.criteria.forEach((criterion, i) => {
      const here = [...path, i];
      if (criterion.kind === "datatype") {
        if (criterion.constant !== null) {
          atoms.push(
            `${criterion.property}(${variable},${quoteConstant(criterion.constant)})`
          );
        } else {
          const v = fresh();
          atoms.push(`${criterion.property}(${variable},${v})`);
          if (criterion.answer) answers.push({ variable: v, path: here, kind: "value" });
        }
      } else {
        const v = fresh();
        atoms.push(`${criterion.property}(${variable},${v})`);
        visit(criterion.child, v, here);
      }
    });
  };
  visit(root, fresh(), []);

  const head = answers.map((a) => a.variable).join(",");
  return { text: `Ans(${head}) :- ${atoms.join(", ")};`, answers };
}

export function emitQuery(state: BuilderState, ontology: OntologyIndex): string {
  return emitQueryWithMeta(state, ontology).text;
}

// ------------------------------------------- structural equivalence

export interface ParsedAtom {
  predicate: string;
  args: { kind: "var" | "const"; value: string }[];
}

export interface ParsedQuery {
  answerVars: string[];
  atoms: ParsedAtom[];
}

/** Small recognizer for the query syntax, enough to compare a builder
 * emission with a hand-written listing. Not the source of truth: the
 * mediator re-parses everything server side. */
export function parseQueryText(text: string): ParsedQuery {
  const stripped = text
    .split("\n")
    .map((line) => {
      const hash = line.indexOf("#");
      return hash >= 0 ? line.slice(0, hash) : line;
    })
    .join("\n")
    .trim();
  const m = stripped.match(/^(\w+)\(([^)]*)\)\s*(?::-|:=)\s*([\s\S]*);$/);
  if (!m) throw new Error("not a conjunctive query: " + text.slice(0, 40));
  const answerVars = m[2].split(",").map((s) => s.trim()).filter(Boolean);
  const atoms: ParsedAtom[] = [];
  let rest = m[3].trim();
  const atomRe = /^(\w+)\(/;
  while (rest.length > 0) {
    const head = rest.match(atomRe);
    if (!head) throw new Error("expected an atom at: " + rest.slice(0, 40));
    rest = rest.slice(head[0].length);
    const args: ParsedAtom["args"] = [];
    for (;;) {
      rest = rest.replace(/^\s+/, "");
      if (rest.startsWith('"')) {
        let i = 1;
        let value = "";
        for (;;) {
          if (i >= rest.length) throw new Error("unterminated constant");
          if (rest[i] === '"') {
            if (rest[i + 1] === '"') {
              value += '"';
              i += 2;
            } else {
              i += 1;
              break;
            }
          } else {
            value += rest[i];
            i += 1;
          }
        }
        rest = rest.slice(i);
        args.push({ kind: "const", value });
      } else {
        const v = rest.match(/^\w+/);
        if (!v) throw new Error("expected an argument at: " + rest.slice(0, 40));
        rest = rest.slice(v[0].length);
        args.push({ kind: "var", value: v[0] });
      }
      rest = rest.replace(/^\s+/, "");
      if (rest.startsWith(",")) {
        rest = rest.slice(1);
        continue;
      }
      if (rest.startsWith(")")) {
        rest = rest.slice(1);
        break;
      }
      throw new Error("expected ',' or ')' at: " + rest.slice(0, 40));
    }
    atoms.push({ predicate: head[1], args });
    rest = rest.replace(/^\s*,?\s*/, "");
  }
  return { answerVars, atoms };
}

function atomSignature(atom: ParsedAtom): string {
  return (
    atom.predicate +
    "/" +
    atom.args.map((a) => (a.kind === "const" ? "c:" + a.value : "v")).join("|")
  );
}

/** True when a variable bijection maps one query onto the other with
 * answer tuples aligned positionally and atoms matched as a multiset. */
export function structurallyEquivalent(aText: string, bText: string): boolean {
  let a: ParsedQuery;
  let b: ParsedQuery;
  try {
    a = parseQueryText(aText);
    b = parseQueryText(bText);
  } catch {
    return false;
  }
  if (a.answerVars.length !== b.answerVars.length) return false;
  if (a.atoms.length !== b.atoms.length) return false;

  const forward = new Map<string, string>();
  const backward = new Map<string, string>();
  const bind = (x: string, y: string): boolean => {
    const fx = forward.get(x);
    const by = backward.get(y);
    if (fx === undefined && by === undefined) {
      forward.set(x, y);
      backward.set(y, x);
      return true;
    }
    return fx === y && by === x;
  };
  const unbind = (x: string, y: string): void => {
    forward.delete(x);
    backward.delete(y);
  };

  for (let i = 0; i < a.answerVars.length; i++) {
    if (!bind(a.answerVars[i], b.answerVars[i])) return false;
  }

  const used = new Array<boolean>(b.atoms.length).fill(false);
  const match = (i: number): boolean => {
    if (i === a.atoms.length) return true;
    const atom = a.atoms[i];
    const sig = atomSignature(atom);
    for (let j = 0; j < b.atoms.length; j++) {
      if (used[j] || atomSignature(b.atoms[j]) !== sig) continue;
      const other = b.atoms[j];
      const added: [string, string][] = [];
      let ok = true;
      for (let k = 0; k < atom.args.length; k++) {
        const x = atom.args[k];
        const y = other.args[k];
        if (x.kind === "const") {
          if (x.value !== y.value) {
            ok = false;
            break;
          }
          continue;
        }
        const fresh =
          forward.get(x.value) === undefined &&
          backward.get(y.value) === undefined;
        if (!bind(x.value, y.value)) {
          ok = false;
          break;
        }
        if (fresh) added.push([x.value, y.value]);
      }
      if (ok) {
        used[j] = true;
        if (match(i + 1)) return true;
        used[j] = false;
      }
      for (const [x, y] of added) unbind(x, y);
    }
    return false;
  };
  return match(0);
}
