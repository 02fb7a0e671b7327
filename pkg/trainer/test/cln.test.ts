import { describe, expect, it } from "vitest";

import { CLN } from "../src/layers.js";
import { mulberry32 } from "../src/random.js";
import { Tensor, mul, noGrad, sum, tensor } from "../src/tensor.js";
import { checkGrad, randomArray, rng } from "./numgrad.js";

/** Plain layer normalization computed independently of the tensor library. */
function layerNormOracle(x: Float64Array, n: number, d: number, eps: number): Float64Array {
  const out = new Float64Array(n * d);
  for (let i = 0; i < n; i++) {
    let mu = 0;
    for (let j = 0; j < d; j++) mu += x[i * d + j];
    mu /= d;
    let variance = 0;
    for (let j = 0; j < d; j++) variance += (x[i * d + j] - mu) ** 2;
    variance /= d;
    const sigma = Math.sqrt(variance);
    for (let j = 0; j < d; j++) out[i * d + j] = (x[i * d + j] - mu) / (sigma + eps);
  }
  return out;
}

describe("CLN", () => {
  it("with gamma frozen to ones and beta to zeros equals standard layer norm", () => {
    // the generators initialize to exactly that frozen state
    const cln = new CLN(6, mulberry32(1));
    const x = tensor(randomArray(4 * 6, rng(2)), [4, 6]);
    const got = cln.forward(x).data;
    const want = layerNormOracle(x.data, 4, 6, cln.eps);
    for (let i = 0; i < want.length; i++) {
      expect(Math.abs(got[i] - want[i])).toBeLessThan(1e-12);
    }
  });

  it("a constant input row normalizes to all zeros before the affine step", () => {
    const cln = new CLN(5, mulberry32(3));
    const x = tensor([2.5, 2.5, 2.5, 2.5, 2.5, 1, 2, 3, 4, 5], [2, 5]);
    const normed = noGrad(() => cln.normalize(x)).data;
    for (let j = 0; j < 5; j++) expect(normed[j]).toBe(0);
    // the non-constant row is untouched by the guard
    expect(Math.abs(normed[9])).toBeGreaterThan(0.1);
  });

  it("gradient of H with respect to L matches central differences on random 5x8 input", () => {
    const cln = new CLN(8, mulberry32(4));
    // randomize the generators so conditioning actually contributes
    const r = rng(5);
    cln.gammaNet.weight.data.set(randomArray(64, r, -0.3, 0.3));
    cln.betaNet.weight.data.set(randomArray(64, r, -0.3, 0.3));
    const x = tensor(randomArray(5 * 8, rng(6)), [5, 8], true);
    const probeW = tensor(randomArray(5 * 8, rng(7), 0.5, 1.5), [5, 8]);
    const build = () => sum(mul(cln.forward(x), probeW));
    const out = build();
    out.backward();
    const res = checkGrad(() => build().item(), x.data, x.grad!);
    expect(res.maxRelError, JSON.stringify(res)).toBeLessThan(1e-4);
  });

  it("gradients of the gamma and beta generators match central differences", () => {
    const cln = new CLN(6, mulberry32(8));
    const r = rng(9);
    cln.gammaNet.weight.data.set(randomArray(36, r, -0.3, 0.3));
    cln.betaNet.weight.data.set(randomArray(36, r, -0.3, 0.3));
    const x = tensor(randomArray(3 * 6, rng(10)), [3, 6]);
    const probeW = tensor(randomArray(3 * 6, rng(11), 0.5, 1.5), [3, 6]);
    const build = () => sum(mul(cln.forward(x), probeW));
    const leaves: Array<[string, Tensor]> = [
      ...cln.gammaNet.namedParams("gamma"),
      ...cln.betaNet.namedParams("beta"),
    ];
    for (const [, t] of leaves) t.zeroGrad();
    build().backward();
    for (const [name, t] of leaves) {
      const res = checkGrad(() => build().item(), t.data, t.grad ?? new Float64Array(t.size));
      expect(res.maxRelError, `${name}: ${JSON.stringify(res)}`).toBeLessThan(1e-4);
    }
  });
});
