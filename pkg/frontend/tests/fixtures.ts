/** The demo vocabulary and source listing, shaped like the API
 * payloads. Kept in one place so builder tests do not need a server. */

import type { OntologyInfo, SourceInfo } from "../src/types.js";

export const ONTOLOGY: OntologyInfo = {
  base_iri: "http://medley.example/onto#",
  classes: [
    { name: "BibRef", parent: null },
    { name: "BioEntity", parent: null },
    { name: "Chromosome", parent: "BioEntity" },
    { name: "Gene", parent: "BioEntity" },
    { name: "PhosphoSite", parent: "BioEntity" },
    { name: "Protein", parent: "BioEntity" },
    { name: "TranscriptionFactor", parent: "Protein" },
  ],
  datatype_properties: [
    { name: "hasDescription", domain: "Protein" },
    { name: "hasFunction", domain: "Gene" },
    { name: "hasName", domain: "BioEntity" },
    { name: "hasSystematicName", domain: "Protein" },
  ],
  object_properties: [
    { name: "belongsTo", domain: "TranscriptionFactor", range: "Chromosome" },
    { name: "hasBibRef", domain: "Protein", range: "BibRef" },
    { name: "hasPhosphoSite", domain: "TranscriptionFactor", range: "PhosphoSite" },
    { name: "interactsWith", domain: "Gene", range: "Gene" },
    { name: "regulatedBy", domain: "Protein", range: "TranscriptionFactor" },
  ],
};

export const SOURCES: SourceInfo[] = [
  {
    name: "sgd",
    endpoint: "inproc:sgd",
    schema: "sgd-2024-01",
    description: "curated protein entries",
    classes: ["BibRef", "Protein"],
    properties: ["hasBibRef", "hasDescription", "hasName"],
  },
  {
    name: "yeastract",
    endpoint: "inproc:yeastract",
    schema: "yeastract-2024-01",
    description: "regulations",
    classes: ["Chromosome", "Protein", "TranscriptionFactor"],
    properties: ["belongsTo", "hasName", "hasSystematicName", "regulatedBy"],
  },
  {
    name: "mips",
    endpoint: "inproc:mips",
    schema: "mips-2024-01",
    description: "functional catalogue",
    classes: ["Gene"],
    properties: ["hasFunction", "hasName"],
  },
  {
    name: "biogrid",
    endpoint: "inproc:biogrid",
    schema: "biogrid-2024-01",
    description: "interactions",
    classes: ["Gene"],
    properties: ["hasName", "interactsWith"],
  },
  {
    name: "phosphogrid",
    endpoint: "inproc:phosphogrid",
    schema: "phosphogrid-2024-01",
    description: "phosphorylation sites",
    classes: ["PhosphoSite", "Protein", "TranscriptionFactor"],
    properties: ["hasName", "hasPhosphoSite"],
  },
];

/** Builder state reproducing the walkthrough flow: a described protein,
 * its references, the transcription factors regulating it filtered to
 * chromosome XVI, and their phosphorylation sites. */
import type { BuilderState } from "../src/builder.js";

export function walkthroughState(): BuilderState {
  return {
    sources: [],
    root: {
      className: "Protein",
      answer: false,
      criteria: [
        {
          kind: "datatype",
          property: "hasDescription",
          constant: "DNA Topoisomerase III",
          answer: false,
        },
        { kind: "datatype", property: "hasSystematicName", constant: null, answer: false },
        {
          kind: "object",
          property: "hasBibRef",
          child: { className: "BibRef", answer: true, criteria: [] },
        },
        {
          kind: "object",
          property: "regulatedBy",
          child: {
            className: "TranscriptionFactor",
            answer: false,
            criteria: [
              { kind: "datatype", property: "hasName", constant: null, answer: false },
              {
                kind: "object",
                property: "belongsTo",
                child: {
                  className: "Chromosome",
                  answer: false,
                  criteria: [
                    { kind: "datatype", property: "hasName", constant: "XVI", answer: false },
                  ],
                },
              },
              {
                kind: "object",
                property: "hasPhosphoSite",
                child: { className: "PhosphoSite", answer: true, criteria: [] },
              },
            ],
          },
        },
      ],
    },
  };
}

export const WALKTHROUGH_LISTING = `Ans(BR,Ph) :- Protein(P), hasDescription(P,"DNA Topoisomerase III"),
              BibRef(BR), hasBibRef(P,BR),
              hasSystematicName(P,SN),
              regulatedBy(P,TF), hasName(TF,Nt), TranscriptionFactor(TF),
              Chromosome(C), hasName(C,"XVI"), belongsTo(TF,C),
              PhosphoSite(Ph), hasPhosphoSite(TF,Ph);`;
