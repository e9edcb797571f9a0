/** DOM helpers for the results side of the page. Everything here takes
 * data the API returned and produces elements; no state lives in the
 * DOM beyond what the user typed. */

import type { Diagnostics, ProvenanceInfo, QueryResponse } from "./types.js";

type Child = Node | string;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: Child[] = []
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else if (key === "text") node.textContent = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) node.append(child);
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function provenanceBadge(rec: ProvenanceInfo): HTMLElement {
  return el("span", {
    class: "badge",
    title: `${rec.description || rec.endpoint}\nschema ${rec.schema}\nretrieved ${rec.retrieved_at}`,
    text: rec.source,
  });
}

export function errorBanner(
  message: string,
  stage: string,
  onRetry: (() => void) | null
): HTMLElement {
  const banner = el("div", { class: "banner error" }, [
    el("strong", { text: `error (${stage})` }),
    " ",
    message,
  ]);
  if (onRetry) {
    const button = el("button", { type: "button", text: "retry" });
    button.addEventListener("click", onRetry);
    banner.append(" ", button);
  }
  return banner;
}

export function answersTable(
  result: QueryResponse,
  onRefine: ((column: number, value: string) => void) | null
): HTMLElement {
  if (result.rows.length === 0) {
    return el("p", { class: "empty", text: "No matches." });
  }
  const table = el("table", { class: "answers" });
  table.append(
    el("tr", {}, result.answer_vars.map((v) => el("th", { text: v })))
  );
  for (const row of result.rows) {
    const tr = el("tr");
    row.forEach((value, column) => {
      const td = el("td", {}, [value]);
      const sources = factSources(result, column, value);
      for (const name of sources) {
        td.append(" ", el("span", { class: "badge small", text: name }));
      }
      if (onRefine) {
        const button = el("button", {
          type: "button",
          class: "refine",
          title: "use this value as a fixed criterion",
          text: "↩",
        });
        button.addEventListener("click", () => onRefine(column, value));
        td.append(" ", button);
      }
      tr.append(td);
    });
    table.append(tr);
  }
  return table;
}

/** Sources asserting the fact behind an answer cell: for individuals
 * the sources of any literal on that key, for plain values the sources
 * of literals carrying that value. */
function factSources(result: QueryResponse, column: number, value: string): string[] {
  const names = new Set<string>();
  for (const ind of result.graph.individuals) {
    const keyMatches = ind.key === value;
    for (const lit of ind.literals) {
      if (keyMatches || lit.value === value) {
        for (const s of lit.sources) names.add(s);
      }
    }
  }
  if (names.size === 0) {
    for (const edge of result.graph.edges) {
      if (edge.domain.key === value || edge.range.key === value) {
        for (const s of edge.sources) names.add(s);
      }
    }
  }
  return [...names].sort();
}

export function explainPanel(diag: Diagnostics): HTMLElement {
  const details = el("details", { class: "explain" });
  details.append(el("summary", { text: "explain" }));
  if (diag.groups) details.append(el("pre", { text: diag.groups }));
  if (diag.plan) details.append(el("pre", { text: diag.plan }));
  if (diag.queries && diag.queries.length) {
    details.append(el("pre", { text: diag.queries.join("\n") }));
  }
  if (diag.calls.length) {
    const table = el("table", { class: "calls" });
    table.append(
      el("tr", {}, ["group", "source", "query", "items"].map((h) => el("th", { text: h })))
    );
    for (const call of diag.calls) {
      table.append(
        el("tr", {}, [
          el("td", { text: call.group }),
          el("td", { text: call.source }),
          el("td", {}, [el("code", { text: call.query })]),
          el("td", { text: String(call.items) }),
        ])
      );
    }
    details.append(table);
  }
  return details;
}

export function warningsList(warnings: string[]): HTMLElement | null {
  if (warnings.length === 0) return null;
  return el(
    "ul",
    { class: "warnings" },
    warnings.map((w) => el("li", { class: "warn", text: w }))
  );
}
