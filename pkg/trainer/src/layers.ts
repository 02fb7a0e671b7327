/* Building blocks: linear maps, embeddings, a BiLSTM encoder, conditional
 * layer normalization, and the residual convolutional refiner block. All
 * parameters are plain Tensors with requiresGrad so the optimizer can walk
 * them uniformly via namedParams().
 */

import { Rand, glorot, uniform } from "./random.js";
import {
  Tensor,
  add,
  addRowVec,
  addScalar,
  asRows,
  concatCols,
  conv2dSame,
  divColVec,
  divRowVec,
  gatherRows,
  matmul,
  meanCols,
  meanLastDim,
  mul,
  mulMask,
  mulRowVec,
  relu,
  reshape,
  sigmoid,
  sliceCols,
  sqrt,
  stackRows,
  subColVec,
  subRowVec,
  tanh,
} from "./tensor.js";

export type NamedParams = Array<[string, Tensor]>;

export class Linear {
  weight: Tensor; // [inDim, outDim]
  bias: Tensor; // [outDim]

  constructor(inDim: number, outDim: number, rand: Rand, initScale: "glorot" | "zero" = "glorot") {
    const w =
      initScale === "zero" ? new Float64Array(inDim * outDim) : glorot(rand, inDim * outDim, inDim, outDim);
    this.weight = new Tensor(w, [inDim, outDim], true);
    this.bias = new Tensor(new Float64Array(outDim), [outDim], true);
  }

  forward(x: Tensor): Tensor {
    return addRowVec(matmul(x, this.weight), this.bias);
  }

  namedParams(prefix: string): NamedParams {
    return [
      [`${prefix}.weight`, this.weight],
      [`${prefix}.bias`, this.bias],
    ];
  }
}

export class Embedding {
  table: Tensor; // [vocab, dim]

  constructor(vocab: number, dim: number, rand: Rand, scale = 0.1) {
    this.table = new Tensor(uniform(rand, vocab * dim, -scale, scale), [vocab, dim], true);
  }

  forward(idx: Int32Array | number[]): Tensor {
    return gatherRows(this.table, idx);
  }

  namedParams(prefix: string): NamedParams {
    return [[`${prefix}.table`, this.table]];
  }
}

/** Inverted dropout; identity when train is false or rate is 0. */
export function dropout(x: Tensor, rate: number, train: boolean, rand: Rand): Tensor {
  if (!train || rate <= 0) return x;
  const keep = 1 - rate;
  const mask = new Float64Array(x.size);
  for (let i = 0; i < mask.length; i++) mask[i] = rand() < keep ? 1 / keep : 0;
  return mulMask(x, mask);
}

/** Single-direction LSTM; gate order i, f, g, o. Forget bias starts at 1. */
export class LSTM {
  wx: Tensor; // [inDim, 4h]
  wh: Tensor; // [h, 4h]
  b: Tensor; // [4h]
  readonly hidden: number;

  constructor(inDim: number, hidden: number, rand: Rand) {
    this.hidden = hidden;
    this.wx = new Tensor(glorot(rand, inDim * 4 * hidden, inDim, 4 * hidden), [inDim, 4 * hidden], true);
    this.wh = new Tensor(glorot(rand, hidden * 4 * hidden, hidden, 4 * hidden), [hidden, 4 * hidden], true);
    const bias = new Float64Array(4 * hidden);
    for (let i = hidden; i < 2 * hidden; i++) bias[i] = 1;
    this.b = new Tensor(bias, [4 * hidden], true);
  }

  /** xs [n, inDim] -> [n, hidden]; reverse=true scans right-to-left. */
  forward(xs: Tensor, reverse = false): Tensor {
    const n = xs.shape[0];
    const h = this.hidden;
    let hPrev: Tensor = new Tensor(new Float64Array(h), [1, h]);
    let cPrev: Tensor = new Tensor(new Float64Array(h), [1, h]);
    const outputs: Tensor[] = new Array(n);
    for (let step = 0; step < n; step++) {
      const t = reverse ? n - 1 - step : step;
      const xt = gatherRows(xs, [t]);
      const z = addRowVec(add(matmul(xt, this.wx), matmul(hPrev, this.wh)), this.b);
      const i = sigmoid(sliceCols(z, 0, h));
      const f = sigmoid(sliceCols(z, h, 2 * h));
      const g = tanh(sliceCols(z, 2 * h, 3 * h));
      const o = sigmoid(sliceCols(z, 3 * h, 4 * h));
      cPrev = add(mul(f, cPrev), mul(i, g));
      hPrev = mul(o, tanh(cPrev));
      outputs[t] = hPrev;
    }
    return stackRows(outputs);
  }

  namedParams(prefix: string): NamedParams {
    return [
      [`${prefix}.wx`, this.wx],
      [`${prefix}.wh`, this.wh],
      [`${prefix}.b`, this.b],
    ];
  }
}

export class BiLSTM {
  fwd: LSTM;
  bwd: LSTM;

  constructor(inDim: number, hidden: number, rand: Rand) {
    this.fwd = new LSTM(inDim, hidden, rand);
    this.bwd = new LSTM(inDim, hidden, rand);
  }

  /** xs [n, inDim] -> [n, 2 * hidden]. */
  forward(xs: Tensor): Tensor {
    return concatCols([this.fwd.forward(xs), this.bwd.forward(xs, true)]);
  }

  namedParams(prefix: string): NamedParams {
    return [...this.fwd.namedParams(`${prefix}.fwd`), ...this.bwd.namedParams(`${prefix}.bwd`)];
  }
}

/**
 * Conditional layer normalization: the affine parameters are generated from
 * the input itself,
 *
 *   H = gammaNet(L) * (L - mu) / (sigma + eps) + betaNet(L)
 *
 * with mu, sigma per-position statistics over the feature dimension. The
 * generators start at gamma = 1, beta = 0 (zero weights, fixed biases), so an
 * untrained CLN is exactly standard layer normalization.
 */
export class CLN {
  gammaNet: Linear;
  betaNet: Linear;
  readonly eps: number;

  constructor(dim: number, rand: Rand, eps = 1e-5) {
    this.eps = eps;
    this.gammaNet = new Linear(dim, dim, rand, "zero");
    this.gammaNet.bias.data.fill(1);
    this.betaNet = new Linear(dim, dim, rand, "zero");
  }

  /** The (L - mu) / (sigma + eps) core, exposed for testing. */
  normalize(l: Tensor): Tensor {
    const mu = meanLastDim(l);
    const centered = subColVec(l, mu);
    const variance = meanLastDim(mul(centered, centered));
    const sigma = sqrt(variance);
    return divColVec(centered, addScalar(sigma, this.eps));
  }

  forward(l: Tensor): Tensor {
    const normed = this.normalize(l);
    return add(mul(this.gammaNet.forward(l), normed), this.betaNet.forward(l));
  }

  namedParams(prefix: string): NamedParams {
    return [...this.gammaNet.namedParams(`${prefix}.gamma`), ...this.betaNet.namedParams(`${prefix}.beta`)];
  }
}

export type NormMode = "channel" | "cell";

/**
 * Normalization for refiner blocks over an [l, l, C] grid. "channel" mode
 * takes statistics per channel across all cells; "cell" mode normalizes each
 * cell across its channels. Learned per-channel gain and bias either way.
 */
export class GridNorm {
  gain: Tensor; // [C]
  bias: Tensor; // [C]
  readonly mode: NormMode;
  readonly eps: number;

  constructor(channels: number, mode: NormMode = "channel", eps = 1e-5) {
    this.mode = mode;
    this.eps = eps;
    this.gain = new Tensor(new Float64Array(channels).fill(1), [channels], true);
    this.bias = new Tensor(new Float64Array(channels), [channels], true);
  }

  forward(g: Tensor): Tensor {
    const [l, , c] = g.shape;
    const rows = asRows(g);
    let normed: Tensor;
    if (this.mode === "channel") {
      const mu = meanCols(rows);
      const centered = subRowVec(rows, mu);
      const sigma = sqrt(meanCols(mul(centered, centered)));
      normed = divRowVec(centered, addScalar(sigma, this.eps));
    } else {
      const mu = meanLastDim(rows);
      const centered = subColVec(rows, mu);
      const sigma = sqrt(meanLastDim(mul(centered, centered)));
      normed = divColVec(centered, addScalar(sigma, this.eps));
    }
    const affine = addRowVec(mulRowVec(normed, this.gain), this.bias);
    return reshape(affine, [l, l, c]);
  }

  namedParams(prefix: string): NamedParams {
    return [
      [`${prefix}.gain`, this.gain],
      [`${prefix}.bias`, this.bias],
    ];
  }
}

/**
 * One residual refinement block: G' = Norm(G + F(G)) where F is a same-padded
 * 2-d convolution with relu and dropout. Zeroing F's parameters makes the
 * block reduce to Norm(G).
 */
export class RefinerBlock {
  weight: Tensor; // [k, k, C, C]
  bias: Tensor; // [C]
  norm: GridNorm;
  readonly dropoutRate: number;

  constructor(channels: number, kernel: number, dropoutRate: number, mode: NormMode, rand: Rand) {
    const fanIn = kernel * kernel * channels;
    this.weight = new Tensor(
      glorot(rand, kernel * kernel * channels * channels, fanIn, channels),
      [kernel, kernel, channels, channels],
      true,
    );
    this.bias = new Tensor(new Float64Array(channels), [channels], true);
    this.norm = new GridNorm(channels, mode);
    this.dropoutRate = dropoutRate;
  }

  forward(g: Tensor, train: boolean, rand: Rand): Tensor {
    let f = relu(conv2dSame(g, this.weight, this.bias));
    f = dropout(f, this.dropoutRate, train, rand);
    return this.norm.forward(add(g, f));
  }

  namedParams(prefix: string): NamedParams {
    return [
      [`${prefix}.weight`, this.weight],
      [`${prefix}.bias`, this.bias],
      ...this.norm.namedParams(`${prefix}.norm`),
    ];
  }
}
