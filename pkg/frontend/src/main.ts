/** Page bootstrap: fetch the ontology and source list, then keep one
 * builder state in memory and re-render the two panels after every
 * mutation. The mediator does all querying; this file is wiring. */

import { ApiClient, MediatorError } from "./api.js";
import {
  BuilderProblem,
  BuilderState,
  ConceptNode,
  Criterion,
  OntologyIndex,
  emitQueryWithMeta,
  emptyState,
  newConcept,
  sourceWarnings,
  validateState,
} from "./builder.js";
import {
  answersTable,
  clear,
  el,
  errorBanner,
  explainPanel,
  provenanceBadge,
  warningsList,
} from "./render.js";
import type { QueryResponse, SourceInfo } from "./types.js";

const client = new ApiClient("");

interface App {
  ontology: OntologyIndex;
  sources: SourceInfo[];
  state: BuilderState;
  lastResult: QueryResponse | null;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function pathKey(path: number[]): string {
  return path.join(".");
}

function nodeAt(root: ConceptNode, path: number[]): ConceptNode {
  let node = root;
  for (const i of path) {
    const criterion = node.criteria[i];
    if (criterion.kind !== "object") throw new Error("bad path");
    node = criterion.child;
  }
  return node;
}

// ------------------------------------------------------ builder panel

function renderBuilder(app: App): void {
  const panel = byId("builder");
  clear(panel);

  const problems = app.state.root
    ? validateState(app.state, app.ontology)
    : [];
  const warnings = sourceWarnings(app.state, app.sources);
  const problemsAt = new Map<string, string[]>();
  for (const p of [...problems, ...warnings]) {
    const key = pathKey(p.path);
    if (!problemsAt.has(key)) problemsAt.set(key, []);
    problemsAt.get(key)!.push(p.message);
  }

  panel.append(renderSources(app));

  if (!app.state.root) {
    const select = el("select");
    select.append(el("option", { value: "", text: "choose a concept..." }));
    for (const name of app.ontology.classNames()) {
      select.append(el("option", { value: name, text: name }));
    }
    select.addEventListener("change", () => {
      if (select.value) {
        app.state.root = newConcept(select.value);
        renderBuilder(app);
      }
    });
    panel.append(el("div", { class: "row" }, ["start from ", select]));
    return;
  }

  panel.append(renderConcept(app, app.state.root, [], problemsAt));

  const runRow = el("div", { class: "row run" });
  const run = el("button", { type: "button", text: "run query" });
  run.addEventListener("click", () => void runQuery(app));
  runRow.append(run);
  const reset = el("button", { type: "button", text: "clear" });
  reset.addEventListener("click", () => {
    app.state = emptyState();
    renderBuilder(app);
  });
  runRow.append(" ", reset);
  panel.append(runRow);

  const rootProblems = problemsAt.get("");
  if (rootProblems) {
    panel.append(
      el("ul", { class: "problems" },
        rootProblems.map((m) => el("li", { class: "warn", text: m })))
    );
  }

  try {
    const emission = emitQueryWithMeta(app.state, app.ontology);
    panel.append(el("pre", { class: "preview", text: emission.text }));
  } catch {
    // incomplete state; the problem list already says why
  }
}

function renderSources(app: App): HTMLElement {
  const box = el("fieldset", { class: "sources" }, [
    el("legend", { text: "sources" }),
  ]);
  for (const source of app.sources) {
    const label = el("label", { title: source.description });
    const input = el("input", { type: "checkbox" });
    input.checked =
      app.state.sources.length === 0 ||
      app.state.sources.includes(source.name);
    input.addEventListener("change", () => {
      const all = app.sources.map((s) => s.name);
      let selected = app.state.sources.length === 0 ? [...all] : [...app.state.sources];
      selected = input.checked
        ? [...selected, source.name]
        : selected.filter((n) => n !== source.name);
      const unique = all.filter((n) => selected.includes(n));
      app.state.sources = unique.length === all.length ? [] : unique;
      renderBuilder(app);
    });
    label.append(input, " " + source.name);
    box.append(label);
  }
  return box;
}

function renderConcept(
  app: App,
  node: ConceptNode,
  path: number[],
  problemsAt: Map<string, string[]>
): HTMLElement {
  const box = el("div", { class: "concept" });
  const head = el("div", { class: "concept-head" }, [
    el("strong", { text: node.className }),
  ]);
  const answer = el("input", { type: "checkbox", title: "include in answers" });
  answer.checked = node.answer;
  answer.addEventListener("change", () => {
    node.answer = answer.checked;
    renderBuilder(app);
  });
  head.append(" ", el("label", {}, [answer, " answer"]));
  box.append(head);

  node.criteria.forEach((criterion, i) => {
    box.append(renderCriterion(app, node, criterion, [...path, i], problemsAt));
  });

  const adder = el("div", { class: "row add" });
  const select = el("select");
  select.append(el("option", { value: "", text: "add a criterion..." }));
  for (const p of app.ontology.datatypePropertiesFor(node.className)) {
    select.append(el("option", { value: "d:" + p, text: p + " (value)" }));
  }
  for (const p of app.ontology.objectPropertiesFor(node.className)) {
    select.append(el("option", { value: "o:" + p, text: p + " (link)" }));
  }
  select.addEventListener("change", () => {
    if (!select.value) return;
    const [kind, property] = [select.value.slice(0, 1), select.value.slice(2)];
    if (kind === "d") {
      node.criteria.push({ kind: "datatype", property, constant: null, answer: false });
    } else {
      const ranges = app.ontology.rangeClassesFor(property);
      node.criteria.push({ kind: "object", property, child: newConcept(ranges[0]) });
    }
    renderBuilder(app);
  });
  adder.append(select);
  box.append(adder);
  return box;
}

function renderCriterion(
  app: App,
  parent: ConceptNode,
  criterion: Criterion,
  path: number[],
  problemsAt: Map<string, string[]>
): HTMLElement {
  const row = el("div", { class: "criterion" });
  const remove = el("button", { type: "button", class: "remove", text: "×" });
  remove.addEventListener("click", () => {
    parent.criteria.splice(path[path.length - 1], 1);
    renderBuilder(app);
  });
  row.append(remove, " ", el("span", { class: "prop", text: criterion.property }));

  if (criterion.kind === "datatype") {
    const mode = el("select");
    mode.append(el("option", { value: "var", text: "any value" }));
    mode.append(el("option", { value: "const", text: "equals" }));
    mode.value = criterion.constant === null ? "var" : "const";
    const input = el("input", { type: "text", placeholder: "value" });
    input.value = criterion.constant ?? "";
    input.style.display = criterion.constant === null ? "none" : "";
    mode.addEventListener("change", () => {
      criterion.constant = mode.value === "const" ? input.value : null;
      renderBuilder(app);
    });
    input.addEventListener("change", () => {
      criterion.constant = input.value;
      renderBuilder(app);
    });
    const answer = el("input", { type: "checkbox", title: "include in answers" });
    answer.checked = criterion.answer;
    answer.addEventListener("change", () => {
      criterion.answer = answer.checked;
      renderBuilder(app);
    });
    row.append(" ", mode, " ", input, " ", el("label", {}, [answer, " answer"]));
  } else {
    const child = renderConcept(app, criterion.child, path, problemsAt);
    row.append(child);
  }

  const messages = problemsAt.get(pathKey(path));
  if (messages) {
    for (const message of messages) {
      row.append(el("span", { class: "badge warn", title: message, text: "!" }));
    }
  }
  return row;
}

// ------------------------------------------------------ results panel

async function runQuery(app: App): Promise<void> {
  const results = byId("results");
  let text: string;
  try {
    text = emitQueryWithMeta(app.state, app.ontology).text;
  } catch (exc) {
    clear(results);
    results.append(errorBanner(String((exc as Error).message), "builder", null));
    return;
  }
  const sources = app.state.sources.length ? app.state.sources : undefined;
  await submit(app, { query: text, sources });
}

async function submit(
  app: App,
  request: { query?: string; keyword?: string; sources?: string[] }
): Promise<void> {
  const results = byId("results");
  clear(results);
  results.append(el("p", { class: "empty", text: "running..." }));
  let result: QueryResponse | null;
  try {
    result = await client.query(request);
  } catch (exc) {
    clear(results);
    if (exc instanceof MediatorError) {
      const retry = exc.stage === "transport" ? () => void submit(app, request) : null;
      results.append(errorBanner(exc.message, exc.stage, retry));
    } else {
      results.append(errorBanner(String(exc), "internal", null));
    }
    return;
  }
  if (result === null) return; // a newer request superseded this one
  app.lastResult = result;
  renderResult(app, result);
}

function renderResult(app: App, result: QueryResponse): void {
  const results = byId("results");
  clear(results);

  const badges = el("div", { class: "badges" });
  for (const rec of result.provenance) badges.append(provenanceBadge(rec));
  results.append(badges);

  results.append(
    answersTable(result, (column, value) => refine(app, column, value))
  );

  const warn = warningsList(result.warnings);
  if (warn) results.append(warn);
  if (result.diagnostics) results.append(explainPanel(result.diagnostics));
}

/** Feed an answer value back into the builder as a fixed criterion. */
function refine(app: App, column: number, value: string): void {
  if (!app.state.root) return;
  let emission;
  try {
    emission = emitQueryWithMeta(app.state, app.ontology);
  } catch {
    return;
  }
  const meta = emission.answers[column];
  if (!meta) return;
  if (meta.kind === "value") {
    const criterionPath = meta.path;
    const parent = nodeAt(app.state.root, criterionPath.slice(0, -1));
    const criterion = parent.criteria[criterionPath[criterionPath.length - 1]];
    if (criterion.kind === "datatype") {
      criterion.constant = value;
      criterion.answer = false;
    }
  } else {
    // an individual: pin it down by name on its concept row
    const node = nodeAt(app.state.root, meta.path);
    const namers = app.ontology
      .datatypePropertiesFor(node.className)
      .filter((p) => p.toLowerCase().includes("name"));
    if (namers.length === 0) return;
    node.criteria.push({
      kind: "datatype",
      property: namers[0],
      constant: value,
      answer: false,
    });
  }
  renderBuilder(app);
}

// ---------------------------------------------------------- bootstrap

async function start(): Promise<void> {
  const results = byId("results");
  let app: App;
  try {
    const [ontology, sources] = await Promise.all([
      client.ontology(),
      client.sources(),
    ]);
    app = {
      ontology: new OntologyIndex(ontology),
      sources,
      state: emptyState(),
      lastResult: null,
    };
  } catch (exc) {
    const message =
      exc instanceof MediatorError ? exc.message : String(exc);
    results.append(errorBanner(message, "transport", () => {
      clear(results);
      void start();
    }));
    return;
  }

  renderBuilder(app);

  const keyword = byId("keyword") as HTMLInputElement;
  byId("keyword-go").addEventListener("click", () => {
    if (keyword.value.trim()) {
      const sources = app.state.sources.length ? app.state.sources : undefined;
      void submit(app, { keyword: keyword.value.trim(), sources });
    }
  });
}

void start();
