/* Training loop: Adam with two learning-rate groups (backbone substitute vs
 * everything else), linear warmup, gradient accumulation to an effective
 * batch, validation through the toolkit CLI after an initial skip phase, and
 * JSON checkpoints keyed by dev argument-classification F1.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import {
  CorpusDoc,
  Grid,
  gridTargets,
  labelVocabulary,
  maskToCells,
  readCorpus,
  readGrids,
  readSchema,
  tokenVocabulary,
  tokensToIds,
  writeGrids,
} from "./data.js";
import { Reduction, binarize, zlprLoss } from "./loss.js";
import { GridModel, ModelConfig, defaultModelConfig } from "./model.js";
import { Rand, mulberry32, shuffle } from "./random.js";
import { Tensor, scale } from "./tensor.js";
import { ScoreReport, f1Of, toolkitDecode, toolkitScore } from "./toolkit.js";

export interface TrainConfig {
  encoderLr: number; // backbone (substitute) group
  otherLr: number; // everything else
  batchSize: number; // documents per optimizer step, via accumulation
  epochs: number;
  warmupRatio: number; // fraction of total steps spent ramping lr from 0
  validationSkip: number; // epochs without validation at the start
  lossReduction: Reduction;
  seed: number;
  beta1: number;
  beta2: number;
  adamEps: number;
}

export function defaultTrainConfig(): TrainConfig {
  return {
    encoderLr: 1e-5,
    otherLr: 1e-3,
    batchSize: 2,
    epochs: 20,
    warmupRatio: 0.1,
    validationSkip: 3,
    lossReduction: "mean",
    seed: 0,
    beta1: 0.9,
    beta2: 0.999,
    adamEps: 1e-8,
  };
}

interface AdamSlot {
  t: Tensor;
  m: Float64Array;
  v: Float64Array;
  lr: number;
}

export class Adam {
  private slots: AdamSlot[] = [];
  private step_ = 0;
  private readonly beta1: number;
  private readonly beta2: number;
  private readonly eps: number;

  constructor(groups: Array<{ params: Tensor[]; lr: number }>, beta1 = 0.9, beta2 = 0.999, eps = 1e-8) {
    this.beta1 = beta1;
    this.beta2 = beta2;
    this.eps = eps;
    for (const group of groups) {
      for (const t of group.params) {
        this.slots.push({ t, m: new Float64Array(t.size), v: new Float64Array(t.size), lr: group.lr });
      }
    }
  }

  zeroGrad(): void {
    for (const slot of this.slots) slot.t.zeroGrad();
  }

  /** One update; lrScale multiplies every group's rate (warmup). */
  step(lrScale = 1): void {
    this.step_ += 1;
    const c1 = 1 - Math.pow(this.beta1, this.step_);
    const c2 = 1 - Math.pow(this.beta2, this.step_);
    for (const slot of this.slots) {
      const g = slot.t.grad;
      if (g === null) continue;
      const { m, v, t } = slot;
      const lr = slot.lr * lrScale;
      for (let i = 0; i < g.length; i++) {
        m[i] = this.beta1 * m[i] + (1 - this.beta1) * g[i];
        v[i] = this.beta2 * v[i] + (1 - this.beta2) * g[i] * g[i];
        t.data[i] -= (lr * (m[i] / c1)) / (Math.sqrt(v[i] / c2) + this.eps);
      }
    }
  }
}

export interface EpochMetrics {
  epoch: number;
  trainLoss: number;
  lrScale: number;
  validated: boolean;
  devScores?: ScoreReport;
  devAcF1?: number;
}

export interface Checkpoint {
  modelConfig: ModelConfig;
  labels: string[];
  tokenVocab: Array<[string, number]>;
  params: Record<string, number[]>;
  epoch: number;
  devAcF1: number | null;
}

export function saveCheckpoint(filePath: string, ckpt: Checkpoint): void {
  fs.writeFileSync(filePath, JSON.stringify(ckpt));
}

export function loadCheckpoint(filePath: string): { model: GridModel; labels: string[]; vocab: Map<string, number> } {
  const ckpt = JSON.parse(fs.readFileSync(filePath, "utf-8")) as Checkpoint;
  const model = new GridModel(ckpt.modelConfig);
  model.loadStateDict(ckpt.params);
  return { model, labels: ckpt.labels, vocab: new Map(ckpt.tokenVocab) };
}

export interface TrainDataset {
  docs: CorpusDoc[];
  targets: Map<string, Uint8Array>; // docId -> positive mask
  labels: string[];
  vocab: Map<string, number>;
}

/** Pair a corpus with its gold grids; every document must have a grid. */
export function buildDataset(corpusPath: string, gridsPath: string, schemaPath: string): TrainDataset {
  const docs = readCorpus(corpusPath);
  const grids = readGrids(gridsPath);
  const labels = labelVocabulary(readSchema(schemaPath));
  const targets = new Map<string, Uint8Array>();
  for (const doc of docs) {
    const grid = grids.get(doc.docId);
    if (grid === undefined) throw new Error(`no gold grid for document ${doc.docId}`);
    if (grid.length !== doc.tokens.length) {
      throw new Error(`grid length ${grid.length} != ${doc.tokens.length} tokens for ${doc.docId}`);
    }
    targets.set(doc.docId, gridTargets(grid, labels));
  }
  return { docs, targets, labels, vocab: tokenVocabulary(docs) };
}

/** Run the model over documents and binarize into grid records. */
export function predictGrids(model: GridModel, docs: CorpusDoc[], vocab: Map<string, number>, labels: string[]): Grid[] {
  return docs.map((doc) => {
    const ids = tokensToIds(doc.tokens, vocab);
    const logits = model.predictLogits(ids);
    const mask = binarize(logits, ids.length * ids.length, labels.length);
    return { docId: doc.docId, length: ids.length, cells: maskToCells(mask, ids.length, labels) };
  });
}

export interface ValidationTarget {
  corpusPath: string; // gold documents; also the token source for decoding
  docs: CorpusDoc[];
}

export interface TrainOptions {
  model: GridModel;
  dataset: TrainDataset;
  config: TrainConfig;
  dev?: ValidationTarget;
  toolkitCmd?: string;
  workDir: string; // scratch + checkpoint directory
  onEpoch?: (m: EpochMetrics) => void;
  /** Stop early once this returns true (checked after each epoch). */
  stopWhen?: (m: EpochMetrics) => boolean;
}

export interface TrainResult {
  metrics: EpochMetrics[];
  bestDevAcF1: number | null;
  bestEpoch: number | null;
  checkpointPath: string;
  stepLosses: number[]; // per optimizer step, for convergence checks
}

export function train(opts: TrainOptions): TrainResult {
  const { model, dataset, config } = opts;
  const toolkitCmd = opts.toolkitCmd ?? "eventgrid";
  const rand: Rand = mulberry32(config.seed);
  const optimizer = new Adam(
    [
      { params: model.encoderParams().map(([, t]) => t), lr: config.encoderLr },
      { params: model.otherParams().map(([, t]) => t), lr: config.otherLr },
    ],
    config.beta1,
    config.beta2,
    config.adamEps,
  );
  const stepsPerEpoch = Math.ceil(dataset.docs.length / config.batchSize);
  const totalSteps = stepsPerEpoch * config.epochs;
  const warmupSteps = Math.max(1, Math.round(totalSteps * config.warmupRatio));
  fs.mkdirSync(opts.workDir, { recursive: true });
  const checkpointPath = path.join(opts.workDir, "best_checkpoint.json");
  const metricsPath = path.join(opts.workDir, "metrics.json");

  const metrics: EpochMetrics[] = [];
  const stepLosses: number[] = [];
  let bestDevAcF1: number | null = null;
  let bestEpoch: number | null = null;
  let globalStep = 0;

  const persist = (epoch: number, devAcF1: number | null) => {
    saveCheckpoint(checkpointPath, {
      modelConfig: model.cfg,
      labels: dataset.labels,
      tokenVocab: Array.from(dataset.vocab.entries()),
      params: model.stateDict(),
      epoch,
      devAcF1,
    });
  };

  for (let epoch = 0; epoch < config.epochs; epoch++) {
    const order = dataset.docs.slice();
    shuffle(order, rand);
    let epochLoss = 0;
    let lastLrScale = 0;
    for (let start = 0; start < order.length; start += config.batchSize) {
      const batch = order.slice(start, start + config.batchSize);
      optimizer.zeroGrad();
      let batchLoss = 0;
      for (const doc of batch) {
        const ids = tokensToIds(doc.tokens, dataset.vocab);
        const { logits } = model.forward(ids, true, rand);
        const loss = zlprLoss(logits, dataset.targets.get(doc.docId)!, config.lossReduction);
        const value = loss.item();
        if (!Number.isFinite(value)) {
          throw new Error(
            `training diverged: loss ${value} at epoch ${epoch}, step ${globalStep}, document ${doc.docId}`,
          );
        }
        batchLoss += value;
        scale(loss, 1 / batch.length).backward();
      }
      globalStep += 1;
      lastLrScale = globalStep <= warmupSteps ? globalStep / warmupSteps : 1;
      optimizer.step(lastLrScale);
      const stepLoss = batchLoss / batch.length;
      stepLosses.push(stepLoss);
      epochLoss += batchLoss;
    }

    const entry: EpochMetrics = {
      epoch,
      trainLoss: epochLoss / order.length,
      lrScale: lastLrScale,
      validated: false,
    };

    if (opts.dev !== undefined && epoch >= config.validationSkip) {
      const devScores = validate(model, opts.dev, dataset, toolkitCmd, opts.workDir);
      entry.validated = true;
      entry.devScores = devScores;
      entry.devAcF1 = f1Of(devScores, "AC");
      if (bestDevAcF1 === null || entry.devAcF1 > bestDevAcF1) {
        bestDevAcF1 = entry.devAcF1;
        bestEpoch = epoch;
        persist(epoch, bestDevAcF1);
      }
    }

    metrics.push(entry);
    fs.writeFileSync(metricsPath, JSON.stringify(metrics, null, 2));
    opts.onEpoch?.(entry);
    if (opts.stopWhen?.(entry)) break;
  }

  if (bestEpoch === null) {
    // no validation ran; keep the final weights
    persist(config.epochs - 1, null);
  }
  return { metrics, bestDevAcF1, bestEpoch, checkpointPath, stepLosses };
}

/** Inference on dev docs, decode and score through the toolkit. */
export function validate(
  model: GridModel,
  dev: ValidationTarget,
  dataset: Pick<TrainDataset, "vocab" | "labels">,
  toolkitCmd: string,
  workDir: string,
): ScoreReport {
  const gridsPath = path.join(workDir, "dev_pred_grids.jsonl");
  const decodedPath = path.join(workDir, "dev_pred_corpus.jsonl");
  writeGrids(gridsPath, predictGrids(model, dev.docs, dataset.vocab, dataset.labels));
  toolkitDecode(toolkitCmd, gridsPath, dev.corpusPath, decodedPath);
  return toolkitScore(toolkitCmd, decodedPath, dev.corpusPath);
}

/** Model sized from data and config overrides; vocab/labels come from the dataset. */
export function buildModel(dataset: TrainDataset, overrides: Partial<ModelConfig>, seed: number): GridModel {
  const cfg: ModelConfig = {
    ...defaultModelConfig(dataset.vocab.size, dataset.labels.length),
    ...overrides,
    vocabSize: dataset.vocab.size,
    numLabels: dataset.labels.length,
  };
  return new GridModel(cfg, mulberry32(seed));
}
