/* Subprocess boundary to the grid toolkit CLI. Decoding grids back into
 * events and scoring predictions are the toolkit's job; the trainer only
 * exchanges files with it.
 */

import { spawnSync } from "node:child_process";

export interface MetricScores {
  precision: number;
  recall: number;
  f1: number | null;
}

export type ScoreReport = Record<string, MetricScores>;

function run(cmd: string, args: string[]): string {
  const parts = cmd.split(/\s+/).filter((p) => p.length > 0);
  const bin = parts[0];
  const result = spawnSync(bin, [...parts.slice(1), ...args], { encoding: "utf-8" });
  if (result.error) {
    throw new Error(`failed to launch ${bin}: ${result.error.message}`);
  }
  if (result.status !== 0) {
    throw new Error(`${bin} ${args.join(" ")} exited ${result.status}: ${result.stderr.trim()}`);
  }
  return result.stdout;
}

/** corpus JSONL -> gold grid JSONL. */
export function toolkitEncode(cmd: string, corpusPath: string, gridsPath: string): void {
  run(cmd, ["encode", corpusPath, "-o", gridsPath]);
}

/** predicted grid JSONL + token source -> predicted corpus JSONL. */
export function toolkitDecode(cmd: string, gridsPath: string, tokensPath: string, outPath: string): void {
  run(cmd, ["decode", gridsPath, "--tokens", tokensPath, "-o", outPath]);
}

/** predicted corpus vs gold corpus -> per-metric precision/recall/F1. */
export function toolkitScore(cmd: string, predPath: string, goldPath: string): ScoreReport {
  const out = run(cmd, ["score", predPath, goldPath, "--json"]);
  return JSON.parse(out) as ScoreReport;
}

/** F1 pulled out of a report; metrics reported NA count as 0. */
export function f1Of(report: ScoreReport, metric: string): number {
  const entry = report[metric];
  if (entry === undefined) throw new Error(`score report has no metric ${metric}`);
  return entry.f1 ?? 0;
}
