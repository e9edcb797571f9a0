/** Shapes of the mediator's JSON API payloads. */

export interface ClassInfo {
  name: string;
  parent: string | null;
}

export interface DatatypePropertyInfo {
  name: string;
  domain: string;
}

export interface ObjectPropertyInfo {
  name: string;
  domain: string;
  range: string;
}

export interface OntologyInfo {
  base_iri: string;
  classes: ClassInfo[];
  datatype_properties: DatatypePropertyInfo[];
  object_properties: ObjectPropertyInfo[];
}

export interface SourceInfo {
  name: string;
  endpoint: string;
  schema: string;
  description: string;
  classes: string[];
  properties: string[];
}

export interface LiteralFact {
  property: string;
  value: string;
  sources: string[];
}

export interface IndividualFacts {
  class: string;
  key: string;
  literals: LiteralFact[];
}

export interface EdgeFact {
  property: string;
  domain: { class: string; key: string };
  range: { class: string; key: string };
  sources: string[];
}

export interface ProvenanceInfo {
  source: string;
  endpoint: string;
  schema: string;
  description: string;
  retrieved_at: string;
}

export interface CallInfo {
  group: string;
  source: string;
  query: string;
  items: number;
  retrieved_at: string;
}

export interface Diagnostics {
  groups?: string;
  plan?: string;
  queries?: string[];
  calls: CallInfo[];
  answer_count: number;
  match_count?: number;
  graph?: { individuals: number; literals: number; edges: number };
}

export interface QueryResponse {
  query: string;
  answer_vars: string[];
  rows: string[][];
  graph: { individuals: IndividualFacts[]; edges: EdgeFact[] };
  provenance: ProvenanceInfo[];
  warnings: string[];
  diagnostics?: Diagnostics;
}

export interface ApiError {
  error: string;
  stage: string;
}
