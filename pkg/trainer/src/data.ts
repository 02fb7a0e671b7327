/* File-based contracts shared with the toolkit: corpus JSONL (documents with
 * tokens), schema JSON (label inventories), and grid JSONL (relation cells).
 * The trainer never imports toolkit code; these formats are the interface.
 */

import * as fs from "node:fs";

export interface CorpusDoc {
  docId: string;
  tokens: string[];
}

export interface Schema {
  event_types: string[];
  argument_roles: string[];
  nugget_types: string[];
}

export interface Grid {
  docId: string;
  length: number;
  cells: Array<[number, number, string]>;
}

function readJsonl(path: string): unknown[] {
  const out: unknown[] = [];
  const lines = fs.readFileSync(path, "utf-8").split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    try {
      out.push(JSON.parse(line));
    } catch {
      throw new Error(`${path}:${i + 1}: invalid JSON`);
    }
  }
  return out;
}

export function readCorpus(path: string): CorpusDoc[] {
  return readJsonl(path).map((obj, i) => {
    const rec = obj as { doc_id?: unknown; tokens?: unknown };
    if (typeof rec.doc_id !== "string" || !Array.isArray(rec.tokens)) {
      throw new Error(`${path}:${i + 1}: expected {"doc_id", "tokens", ...}`);
    }
    return { docId: rec.doc_id, tokens: rec.tokens.map(String) };
  });
}

export function readSchema(path: string): Schema {
  const obj = JSON.parse(fs.readFileSync(path, "utf-8")) as Schema;
  for (const key of ["event_types", "argument_roles", "nugget_types"] as const) {
    if (!Array.isArray(obj[key])) throw new Error(`${path}: schema missing ${key}`);
  }
  return obj;
}

/**
 * Relation label vocabulary in a fixed order: the two structural labels,
 * then typed trigger closures, then role closures, following schema order.
 * 32 labels under the stock ontology.
 */
export function labelVocabulary(schema: Schema): string[] {
  return [
    "HTL",
    "EAL",
    ...schema.event_types.map((t) => `ET:${t}`),
    ...schema.argument_roles.map((r) => `AT:${r}`),
  ];
}

export function readGrids(path: string): Map<string, Grid> {
  const grids = new Map<string, Grid>();
  for (const obj of readJsonl(path)) {
    const rec = obj as { doc_id?: unknown; length?: unknown; cells?: unknown };
    if (typeof rec.doc_id !== "string" || typeof rec.length !== "number" || !Array.isArray(rec.cells)) {
      throw new Error(`${path}: expected {"doc_id", "length", "cells"} grid records`);
    }
    const cells = (rec.cells as Array<[number, number, string]>).map(
      ([r, c, label]) => [r, c, String(label)] as [number, number, string],
    );
    if (grids.has(rec.doc_id)) throw new Error(`${path}: duplicate doc_id ${rec.doc_id}`);
    grids.set(rec.doc_id, { docId: rec.doc_id, length: rec.length, cells });
  }
  return grids;
}

export function writeGrids(path: string, grids: Iterable<Grid>): void {
  const lines: string[] = [];
  for (const g of grids) {
    const cells = [...g.cells].sort((a, b) => a[0] - b[0] || a[1] - b[1] || (a[2] < b[2] ? -1 : a[2] > b[2] ? 1 : 0));
    lines.push(JSON.stringify({ doc_id: g.docId, length: g.length, cells }));
  }
  fs.writeFileSync(path, lines.join("\n") + (lines.length ? "\n" : ""));
}

/** Per-cell positive-label mask aligned with labelVocabulary order. */
export function gridTargets(grid: Grid, labels: string[]): Uint8Array {
  const index = new Map(labels.map((lbl, k) => [lbl, k]));
  const l = grid.length;
  const out = new Uint8Array(l * l * labels.length);
  for (const [r, c, label] of grid.cells) {
    const k = index.get(label);
    if (k === undefined) throw new Error(`grid ${grid.docId}: label ${label} not in vocabulary`);
    if (r < 0 || r >= l || c < 0 || c >= l) {
      throw new Error(`grid ${grid.docId}: cell (${r}, ${c}) outside ${l} x ${l}`);
    }
    out[(r * l + c) * labels.length + k] = 1;
  }
  return out;
}

/** Binary per-cell mask -> sparse cells in the shared grid format. */
export function maskToCells(mask: Uint8Array, l: number, labels: string[]): Array<[number, number, string]> {
  const r = labels.length;
  if (mask.length !== l * l * r) throw new Error("maskToCells: length mismatch");
  const cells: Array<[number, number, string]> = [];
  for (let i = 0; i < l; i++) {
    for (let j = 0; j < l; j++) {
      for (let k = 0; k < r; k++) {
        if (mask[(i * l + j) * r + k]) cells.push([i, j, labels[k]]);
      }
    }
  }
  return cells;
}

/** Token vocabulary from a corpus; index 0 is the unknown bucket. */
export function tokenVocabulary(docs: CorpusDoc[]): Map<string, number> {
  const vocab = new Map<string, number>([["<unk>", 0]]);
  for (const doc of docs) {
    for (const tok of doc.tokens) {
      if (!vocab.has(tok)) vocab.set(tok, vocab.size);
    }
  }
  return vocab;
}

export function tokensToIds(tokens: string[], vocab: Map<string, number>): Int32Array {
  const ids = new Int32Array(tokens.length);
  for (let i = 0; i < tokens.length; i++) ids[i] = vocab.get(tokens[i]) ?? 0;
  return ids;
}
