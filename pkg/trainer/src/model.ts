/* Grid predictor: token embeddings -> BiLSTM -> conditional layer norm ->
 * pairwise features [h_i ; h_j ; dist(j - i)] -> MLP -> residual
 * convolutional refinement -> per-cell relation logits.
 *
 * The backbone slot holds a small trainable embedding table ("tiny"), sized
 * for desk-scale runs; pretrained encoders are not bundled. Each word is a
 * single piece under the substitute, so first-piece subword pooling is the
 * identity here.
 */

import { BiLSTM, CLN, Embedding, Linear, NamedParams, NormMode, RefinerBlock, dropout } from "./layers.js";
import { Rand, mulberry32 } from "./random.js";
import { Tensor, add, concatCols, gatherRows, noGrad, reshape, scale, stackRows, tanh } from "./tensor.js";

export interface ModelConfig {
  backbone: string; // "tiny" trainable substitute; pretrained ids rejected
  vocabSize: number;
  embeddingDim: number; // substitute width
  hiddenSize: number; // BiLSTM hidden per direction
  distanceDim: number; // distance embedding size
  maxDistance: number; // clip |j - i| here
  gridChannels: number; // C_g
  pairHidden: number; // MLP hidden width for pair projection
  refinerLayers: number; // K residual blocks
  refinerKernel: number;
  refinerDropout: number;
  dropout: number; // dropout outside the refiner
  refinerNorm: NormMode;
  numLabels: number; // relation vocabulary size
  maxEncoderLength: number; // longer documents go through windowed encoding
  windowOverlap: number;
}

/** Full-scale defaults; desk-scale runs override the width fields. */
export function defaultModelConfig(vocabSize: number, numLabels: number): ModelConfig {
  return {
    backbone: "tiny",
    vocabSize,
    embeddingDim: 128,
    hiddenSize: 1024,
    distanceDim: 20,
    maxDistance: 128,
    gridChannels: 256,
    pairHidden: 256,
    refinerLayers: 2,
    refinerKernel: 3,
    refinerDropout: 0.1,
    dropout: 0.5,
    refinerNorm: "channel",
    numLabels,
    maxEncoderLength: 512,
    windowOverlap: 64,
  };
}

/** Table row for the clipped signed distance j - i. Diagonal maps to offset 0. */
export function distanceIndex(i: number, j: number, maxDistance: number): number {
  const d = Math.max(-maxDistance, Math.min(maxDistance, j - i));
  return d + maxDistance;
}

/**
 * Split [0, l) into encoder windows of at most maxLen with the given overlap.
 * Single window when the document fits. Pure so the overlap-average path can
 * be tested without running an encoder.
 */
export function planWindows(l: number, maxLen: number, overlap: number): Array<[number, number]> {
  if (l <= maxLen) return [[0, l]];
  if (overlap >= maxLen) throw new Error(`windowOverlap ${overlap} must be < maxEncoderLength ${maxLen}`);
  const stride = maxLen - overlap;
  const windows: Array<[number, number]> = [];
  for (let start = 0; ; start += stride) {
    if (start + maxLen >= l) {
      windows.push([l - maxLen, l]);
      break;
    }
    windows.push([start, start + maxLen]);
  }
  return windows;
}

export interface EncodeResult {
  h: Tensor; // [l, 2 * hiddenSize]
  windowed: boolean;
}

export interface ForwardResult {
  logits: Tensor; // [l * l, numLabels]
  windowed: boolean;
}

export class GridModel {
  readonly cfg: ModelConfig;
  embedding: Embedding;
  bilstm: BiLSTM;
  cln: CLN;
  distEmb: Embedding;
  pairIn: Linear;
  pairOut: Linear;
  blocks: RefinerBlock[];
  head: Linear;

  constructor(cfg: ModelConfig, rand: Rand = mulberry32(0)) {
    if (cfg.backbone !== "tiny") {
      throw new Error(`backbone "${cfg.backbone}": pretrained encoders are not bundled; use "tiny"`);
    }
    this.cfg = cfg;
    this.embedding = new Embedding(cfg.vocabSize, cfg.embeddingDim, rand);
    this.bilstm = new BiLSTM(cfg.embeddingDim, cfg.hiddenSize, rand);
    const d = 2 * cfg.hiddenSize;
    this.cln = new CLN(d, rand);
    this.distEmb = new Embedding(2 * cfg.maxDistance + 1, cfg.distanceDim, rand);
    this.pairIn = new Linear(2 * d + cfg.distanceDim, cfg.pairHidden, rand);
    this.pairOut = new Linear(cfg.pairHidden, cfg.gridChannels, rand);
    this.blocks = [];
    for (let k = 0; k < cfg.refinerLayers; k++) {
      this.blocks.push(new RefinerBlock(cfg.gridChannels, cfg.refinerKernel, cfg.refinerDropout, cfg.refinerNorm, rand));
    }
    this.head = new Linear(cfg.gridChannels, cfg.numLabels, rand);
    // almost every cell carries no label, so start the head at a negative
    // prior; an untrained model then predicts near-empty grids instead of
    // dense noise
    this.head.bias.data.fill(-2);
  }

  /** Tokens -> contextual representations [l, 2h]; windows + overlap average past maxEncoderLength. */
  encodeTokens(tokenIds: Int32Array | number[], train: boolean, rand: Rand): EncodeResult {
    const l = tokenIds.length;
    const cfg = this.cfg;
    const windows = planWindows(l, cfg.maxEncoderLength, cfg.windowOverlap);
    let contextual: Tensor;
    if (windows.length === 1) {
      const emb = dropout(this.embedding.forward(tokenIds), cfg.dropout, train, rand);
      contextual = this.bilstm.forward(emb);
    } else {
      const perWindow: Tensor[] = windows.map(([s, e]) => {
        const ids = Array.from(tokenIds).slice(s, e);
        const emb = dropout(this.embedding.forward(ids), cfg.dropout, train, rand);
        return this.bilstm.forward(emb);
      });
      const rows: Tensor[] = new Array(l);
      for (let pos = 0; pos < l; pos++) {
        const covering: Tensor[] = [];
        for (let w = 0; w < windows.length; w++) {
          const [s, e] = windows[w];
          if (pos >= s && pos < e) covering.push(gatherRows(perWindow[w], [pos - s]));
        }
        let row = covering[0];
        for (let k = 1; k < covering.length; k++) row = add(row, covering[k]);
        rows[pos] = covering.length > 1 ? scale(row, 1 / covering.length) : row;
      }
      contextual = stackRows(rows);
    }
    const h = dropout(this.cln.forward(contextual), cfg.dropout, train, rand);
    return { h, windowed: windows.length > 1 };
  }

  /** H [l, d] -> pair grid as rows [l * l, C_g], row-major over (i, j). */
  pairFeatures(h: Tensor, train: boolean, rand: Rand): Tensor {
    const l = h.shape[0];
    const cfg = this.cfg;
    const iIdx = new Int32Array(l * l);
    const jIdx = new Int32Array(l * l);
    const dIdx = new Int32Array(l * l);
    for (let i = 0; i < l; i++) {
      for (let j = 0; j < l; j++) {
        const k = i * l + j;
        iIdx[k] = i;
        jIdx[k] = j;
        dIdx[k] = distanceIndex(i, j, cfg.maxDistance);
      }
    }
    const z = concatCols([gatherRows(h, iIdx), gatherRows(h, jIdx), this.distEmb.forward(dIdx)]);
    const hidden = dropout(tanh(this.pairIn.forward(z)), cfg.dropout, train, rand);
    return this.pairOut.forward(hidden);
  }

  /** G0 rows [l * l, C] -> refined rows after K residual blocks. */
  refine(gridRows: Tensor, l: number, train: boolean, rand: Rand): Tensor {
    if (this.blocks.length === 0) return gridRows;
    let g = reshape(gridRows, [l, l, this.cfg.gridChannels]);
    for (const block of this.blocks) g = block.forward(g, train, rand);
    return reshape(g, [l * l, this.cfg.gridChannels]);
  }

  forward(tokenIds: Int32Array | number[], train: boolean, rand: Rand): ForwardResult {
    const l = tokenIds.length;
    const { h, windowed } = this.encodeTokens(tokenIds, train, rand);
    const g0 = this.pairFeatures(h, train, rand);
    const gk = this.refine(g0, l, train, rand);
    return { logits: this.head.forward(gk), windowed };
  }

  /** Inference logits as a flat array, no graph kept. */
  predictLogits(tokenIds: Int32Array | number[]): Float64Array {
    return noGrad(() => this.forward(tokenIds, false, mulberry32(0)).logits.data);
  }

  /** The backbone substitute; trained at the encoder learning rate. */
  encoderParams(): NamedParams {
    return this.embedding.namedParams("embedding");
  }

  /** Everything that is not the backbone; trained at the base learning rate. */
  otherParams(): NamedParams {
    const out: NamedParams = [
      ...this.bilstm.namedParams("bilstm"),
      ...this.cln.namedParams("cln"),
      ...this.distEmb.namedParams("dist"),
      ...this.pairIn.namedParams("pairIn"),
      ...this.pairOut.namedParams("pairOut"),
      ...this.head.namedParams("head"),
    ];
    this.blocks.forEach((b, k) => out.push(...b.namedParams(`refiner${k}`)));
    return out;
  }

  namedParams(): NamedParams {
    return [...this.encoderParams(), ...this.otherParams()];
  }

  /** Parameter snapshot for JSON checkpoints. */
  stateDict(): Record<string, number[]> {
    const out: Record<string, number[]> = {};
    for (const [name, t] of this.namedParams()) out[name] = Array.from(t.data);
    return out;
  }

  loadStateDict(state: Record<string, number[]>): void {
    for (const [name, t] of this.namedParams()) {
      const values = state[name];
      if (values === undefined) throw new Error(`checkpoint missing parameter ${name}`);
      if (values.length !== t.size) {
        throw new Error(`checkpoint parameter ${name} has ${values.length} values, expected ${t.size}`);
      }
      t.data.set(values);
    }
  }
}
