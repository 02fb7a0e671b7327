/* Multi-label cell loss and zero-threshold inference.
 *
 * Per cell, with positive label set P and negative set N over the relation
 * vocabulary:
 *
 *   loss = log(1 + sum_{r in N} e^{y_r}) + log(1 + sum_{r in P} e^{-y_r})
 *
 * The implicit 1 inside each log acts as a zero-logit threshold class, which
 * is what makes plain sign(y) > 0 the right inference rule. Both sums are
 * computed with a max shift so large logits cannot overflow.
 */

import { Tensor } from "./tensor.js";

export type Reduction = "mean" | "sum";

function logOnePlusSumExp(values: Float64Array, grad: Float64Array): number {
  // grad receives d(result)/d(values[k]); values may be empty (result ln 1 = 0)
  let m = 0;
  for (let k = 0; k < values.length; k++) {
    if (values[k] > m) m = values[k];
  }
  let s = Math.exp(-m);
  for (let k = 0; k < values.length; k++) s += Math.exp(values[k] - m);
  for (let k = 0; k < values.length; k++) grad[k] = Math.exp(values[k] - m) / s;
  return m + Math.log(s);
}

/**
 * ZLPR loss over an [n, R] logit matrix. positives[i * R + r] marks label r
 * gold-positive at cell i; everything else is negative. Returns a scalar
 * tensor; gradient flows into logits.
 */
export function zlprLoss(logits: Tensor, positives: Uint8Array, reduction: Reduction = "mean"): Tensor {
  if (logits.shape.length !== 2) throw new Error(`zlprLoss: expected [n, R] logits, got [${logits.shape}]`);
  const [n, r] = logits.shape;
  if (positives.length !== n * r) {
    throw new Error(`zlprLoss: positives length ${positives.length} != ${n * r}`);
  }
  const cellGrad = new Float64Array(n * r);
  const posVals = new Float64Array(r);
  const negVals = new Float64Array(r);
  const posIdx = new Int32Array(r);
  const negIdx = new Int32Array(r);
  const posG = new Float64Array(r);
  const negG = new Float64Array(r);
  let total = 0;
  for (let i = 0; i < n; i++) {
    let np = 0;
    let nn = 0;
    for (let k = 0; k < r; k++) {
      const y = logits.data[i * r + k];
      if (positives[i * r + k]) {
        posVals[np] = -y;
        posIdx[np++] = k;
      } else {
        negVals[nn] = y;
        negIdx[nn++] = k;
      }
    }
    total += logOnePlusSumExp(negVals.subarray(0, nn), negG);
    total += logOnePlusSumExp(posVals.subarray(0, np), posG);
    for (let k = 0; k < nn; k++) cellGrad[i * r + negIdx[k]] = negG[k];
    for (let k = 0; k < np; k++) cellGrad[i * r + posIdx[k]] = -posG[k];
  }
  const factor = reduction === "mean" ? 1 / n : 1;
  const out = new Tensor(Float64Array.of(total * factor), [1]);
  if (logits.requiresGrad) {
    out.requiresGrad = true;
    out.parents = [logits];
    out.backwardFn = () => {
      const g = out.grad![0] * factor;
      const gl = logits.ensureGrad();
      for (let k = 0; k < cellGrad.length; k++) gl[k] += g * cellGrad[k];
    };
  }
  return out;
}

/** Strict zero-threshold binarization: label r is on at cell i iff y > 0. */
export function binarize(logits: Float64Array, n: number, r: number): Uint8Array {
  if (logits.length !== n * r) throw new Error("binarize: length mismatch");
  const out = new Uint8Array(n * r);
  for (let k = 0; k < out.length; k++) out[k] = logits[k] > 0 ? 1 : 0;
  return out;
}
