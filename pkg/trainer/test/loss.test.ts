import { describe, expect, it } from "vitest";

import { binarize, zlprLoss } from "../src/loss.js";
import { tensor, zeros } from "../src/tensor.js";
import { checkGrad, randomArray, rng } from "./numgrad.js";

describe("zlprLoss values", () => {
  it("all-zero logits with 1 positive of 32 labels gives ln 32 + ln 2", () => {
    const logits = zeros([1, 32], true);
    const pos = new Uint8Array(32);
    pos[5] = 1;
    const loss = zlprLoss(logits, pos);
    expect(Math.abs(loss.item() - (Math.log(32) + Math.log(2)))).toBeLessThan(1e-6);
  });

  it("no positives and strongly negative logits drive the loss to zero", () => {
    const logits = tensor(new Float64Array(8).fill(-40), [2, 4], true);
    const loss = zlprLoss(logits, new Uint8Array(8));
    expect(loss.item()).toBeLessThan(1e-12);
    expect(loss.item()).toBeGreaterThanOrEqual(0);
  });

  it("sum reduction equals mean times the cell count", () => {
    const rand = rng(7);
    const data = randomArray(3 * 5, rand);
    const pos = new Uint8Array(15);
    for (let i = 0; i < 15; i++) pos[i] = rand() < 0.3 ? 1 : 0;
    const m = zlprLoss(tensor(data.slice(), [3, 5]), pos, "mean").item();
    const s = zlprLoss(tensor(data.slice(), [3, 5]), pos, "sum").item();
    expect(Math.abs(s - m * 3)).toBeLessThan(1e-12);
  });

  it("is invariant to permuting labels within the positive and negative sets", () => {
    // the loss reads each side as a bag of logits, so swapping two positives'
    // values (and likewise two negatives') must not change it
    const vals = Float64Array.from([0.3, -1.2, 0.8, 2.1, -0.4, 0.05]);
    const pos = Uint8Array.from([1, 0, 1, 0, 0, 1]);
    const base = zlprLoss(tensor(vals.slice(), [1, 6]), pos).item();
    const swapped = vals.slice();
    [swapped[0], swapped[2]] = [swapped[2], swapped[0]]; // two positives
    [swapped[1], swapped[4]] = [swapped[4], swapped[1]]; // two negatives
    const after = zlprLoss(tensor(swapped, [1, 6]), pos).item();
    expect(Math.abs(after - base)).toBeLessThan(1e-12);
  });

  it("does not overflow on large logits", () => {
    const logits = tensor([900, -900, 850], [1, 3], true);
    const pos = Uint8Array.from([0, 1, 0]);
    const loss = zlprLoss(logits, pos);
    expect(Number.isFinite(loss.item())).toBe(true);
    expect(loss.item()).toBeGreaterThan(900); // dominated by the 900 negative logit
  });
});

describe("zlprLoss gradient", () => {
  it("matches central differences on a random 3x3x5 grid", () => {
    const rand = rng(42);
    const logits = tensor(randomArray(9 * 5, rand, -2, 2), [9, 5], true);
    const pos = new Uint8Array(9 * 5);
    for (let i = 0; i < pos.length; i++) pos[i] = rand() < 0.25 ? 1 : 0;
    const loss = zlprLoss(logits, pos);
    loss.backward();
    const res = checkGrad(() => zlprLoss(logits, pos).item(), logits.data, logits.grad!);
    expect(res.maxRelError, JSON.stringify(res)).toBeLessThan(1e-4);
  });

  it("matches central differences under sum reduction", () => {
    const rand = rng(43);
    const logits = tensor(randomArray(4 * 6, rand, -2, 2), [4, 6], true);
    const pos = new Uint8Array(4 * 6);
    for (let i = 0; i < pos.length; i++) pos[i] = rand() < 0.4 ? 1 : 0;
    const loss = zlprLoss(logits, pos, "sum");
    loss.backward();
    const res = checkGrad(() => zlprLoss(logits, pos, "sum").item(), logits.data, logits.grad!);
    expect(res.maxRelError, JSON.stringify(res)).toBeLessThan(1e-4);
  });
});

describe("binarize", () => {
  it("thresholds strictly above zero", () => {
    const out = binarize(Float64Array.from([0.1, 0, -0.1, 1e-12]), 1, 4);
    expect(Array.from(out)).toEqual([1, 0, 0, 1]);
  });

  it("all-negative logits produce an empty label set", () => {
    const out = binarize(Float64Array.from([-3, -1, -0.5, -2]), 2, 2);
    expect(Array.from(out)).toEqual([0, 0, 0, 0]);
  });
});
