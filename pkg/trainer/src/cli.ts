#!/usr/bin/env node
/* Command line: train a grid predictor from a corpus + gold grids, or run a
 * checkpoint over documents to emit predicted grids. Decoding those grids
 * into events is the toolkit's job.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { parseArgs } from "node:util";

import { readCorpus, writeGrids } from "./data.js";
import { ModelConfig } from "./model.js";
import {
  buildDataset,
  buildModel,
  defaultTrainConfig,
  loadCheckpoint,
  predictGrids,
  train,
} from "./train.js";
import { toolkitEncode } from "./toolkit.js";

const USAGE = `usage:
  eventgrid-trainer train --corpus train.jsonl --schema schema.json --out rundir
                          [--grids gold.jsonl] [--dev dev.jsonl]
                          [--toolkit-cmd eventgrid] [--seed N] [--epochs N]
                          [--batch-size N] [--encoder-lr X] [--other-lr X]
                          [--warmup-ratio X] [--validation-skip N]
                          [--loss-reduction mean|sum]
                          [--embedding-dim N] [--hidden-size N]
                          [--distance-dim N] [--max-distance N]
                          [--grid-channels N] [--pair-hidden N]
                          [--refiner-layers N] [--refiner-kernel N]
                          [--refiner-dropout X] [--dropout X]
                          [--refiner-norm channel|cell]
                          [--max-encoder-length N] [--window-overlap N]
  eventgrid-trainer infer --checkpoint ckpt.json --corpus docs.jsonl --out grids.jsonl

Gold grids come from the toolkit's encoder; when --grids is omitted the
trainer invokes "<toolkit-cmd> encode" itself.`;

interface NumOpt {
  key: string;
  parse: (v: string) => number;
}

function num(v: string, flag: string): number {
  const x = Number(v);
  if (!Number.isFinite(x)) throw new Error(`${flag}: expected a number, got ${v}`);
  return x;
}

function intArg(v: string, flag: string): number {
  const x = num(v, flag);
  if (!Number.isInteger(x) || x < 0) throw new Error(`${flag}: expected a non-negative integer`);
  return x;
}

function cmdTrain(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      corpus: { type: "string" },
      grids: { type: "string" },
      schema: { type: "string" },
      dev: { type: "string" },
      out: { type: "string" },
      "toolkit-cmd": { type: "string", default: "eventgrid" },
      seed: { type: "string", default: "0" },
      epochs: { type: "string" },
      "batch-size": { type: "string" },
      "encoder-lr": { type: "string" },
      "other-lr": { type: "string" },
      "warmup-ratio": { type: "string" },
      "validation-skip": { type: "string" },
      "loss-reduction": { type: "string" },
      "embedding-dim": { type: "string" },
      "hidden-size": { type: "string" },
      "distance-dim": { type: "string" },
      "max-distance": { type: "string" },
      "grid-channels": { type: "string" },
      "pair-hidden": { type: "string" },
      "refiner-layers": { type: "string" },
      "refiner-kernel": { type: "string" },
      "refiner-dropout": { type: "string" },
      dropout: { type: "string" },
      "refiner-norm": { type: "string" },
      "max-encoder-length": { type: "string" },
      "window-overlap": { type: "string" },
    },
  });
  for (const required of ["corpus", "schema", "out"] as const) {
    if (values[required] === undefined) throw new Error(`--${required} is required`);
  }
  const workDir = values.out!;
  fs.mkdirSync(workDir, { recursive: true });

  let gridsPath = values.grids;
  if (gridsPath === undefined) {
    gridsPath = path.join(workDir, "gold_grids.jsonl");
    toolkitEncode(values["toolkit-cmd"]!, values.corpus!, gridsPath);
  }
  const dataset = buildDataset(values.corpus!, gridsPath, values.schema!);

  const config = defaultTrainConfig();
  config.seed = intArg(values.seed!, "--seed");
  if (values.epochs !== undefined) config.epochs = intArg(values.epochs, "--epochs");
  if (values["batch-size"] !== undefined) config.batchSize = intArg(values["batch-size"], "--batch-size");
  if (values["encoder-lr"] !== undefined) config.encoderLr = num(values["encoder-lr"], "--encoder-lr");
  if (values["other-lr"] !== undefined) config.otherLr = num(values["other-lr"], "--other-lr");
  if (values["warmup-ratio"] !== undefined) config.warmupRatio = num(values["warmup-ratio"], "--warmup-ratio");
  if (values["validation-skip"] !== undefined) {
    config.validationSkip = intArg(values["validation-skip"], "--validation-skip");
  }
  if (values["loss-reduction"] !== undefined) {
    if (values["loss-reduction"] !== "mean" && values["loss-reduction"] !== "sum") {
      throw new Error("--loss-reduction: expected mean or sum");
    }
    config.lossReduction = values["loss-reduction"];
  }

  const overrides: Partial<ModelConfig> = {};
  const numeric: Array<[string, keyof ModelConfig, (v: string) => number]> = [
    ["embedding-dim", "embeddingDim", (v) => intArg(v, "--embedding-dim")],
    ["hidden-size", "hiddenSize", (v) => intArg(v, "--hidden-size")],
    ["distance-dim", "distanceDim", (v) => intArg(v, "--distance-dim")],
    ["max-distance", "maxDistance", (v) => intArg(v, "--max-distance")],
    ["grid-channels", "gridChannels", (v) => intArg(v, "--grid-channels")],
    ["pair-hidden", "pairHidden", (v) => intArg(v, "--pair-hidden")],
    ["refiner-layers", "refinerLayers", (v) => intArg(v, "--refiner-layers")],
    ["refiner-kernel", "refinerKernel", (v) => intArg(v, "--refiner-kernel")],
    ["refiner-dropout", "refinerDropout", (v) => num(v, "--refiner-dropout")],
    ["dropout", "dropout", (v) => num(v, "--dropout")],
    ["max-encoder-length", "maxEncoderLength", (v) => intArg(v, "--max-encoder-length")],
    ["window-overlap", "windowOverlap", (v) => intArg(v, "--window-overlap")],
  ];
  for (const [flag, key, parse] of numeric) {
    const raw = (values as Record<string, string | undefined>)[flag];
    if (raw !== undefined) (overrides as Record<string, number>)[key] = parse(raw);
  }
  if (values["refiner-norm"] !== undefined) {
    if (values["refiner-norm"] !== "channel" && values["refiner-norm"] !== "cell") {
      throw new Error("--refiner-norm: expected channel or cell");
    }
    overrides.refinerNorm = values["refiner-norm"];
  }

  const model = buildModel(dataset, overrides, config.seed);
  const dev = values.dev !== undefined ? { corpusPath: values.dev, docs: readCorpus(values.dev) } : undefined;
  const result = train({
    model,
    dataset,
    config,
    dev,
    toolkitCmd: values["toolkit-cmd"],
    workDir,
    onEpoch: (m) => {
      const val = m.validated ? `, dev AC F1 ${m.devAcF1!.toFixed(4)}` : "";
      process.stderr.write(`epoch ${m.epoch}: loss ${m.trainLoss.toFixed(6)}${val}\n`);
    },
  });
  process.stderr.write(
    result.bestEpoch !== null
      ? `best dev AC F1 ${result.bestDevAcF1!.toFixed(4)} at epoch ${result.bestEpoch}\n`
      : "no validation ran; saved final weights\n",
  );
  process.stderr.write(`checkpoint: ${result.checkpointPath}\n`);
  return 0;
}

function cmdInfer(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      checkpoint: { type: "string" },
      corpus: { type: "string" },
      out: { type: "string" },
    },
  });
  for (const required of ["checkpoint", "corpus", "out"] as const) {
    if (values[required] === undefined) throw new Error(`--${required} is required`);
  }
  const { model, labels, vocab } = loadCheckpoint(values.checkpoint!);
  const docs = readCorpus(values.corpus!);
  writeGrids(values.out!, predictGrids(model, docs, vocab, labels));
  process.stderr.write(`wrote ${docs.length} grids to ${values.out}\n`);
  return 0;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "train") return cmdTrain(rest);
    if (command === "infer") return cmdInfer(rest);
    process.stderr.write(USAGE + "\n");
    return command === undefined || command === "--help" || command === "-h" ? 0 : 2;
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
    return 1;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("cli.ts")) {
  process.exit(main(process.argv.slice(2)));
}
