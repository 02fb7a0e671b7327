/* Seeded RNG so training runs are reproducible on CPU. */

export type Rand = () => number;

/** mulberry32: fast 32-bit PRNG, uniform in [0, 1). */
export function mulberry32(seed: number): Rand {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Uniform in [lo, hi). */
export function uniform(rand: Rand, n: number, lo: number, hi: number): Float64Array {
  const out = new Float64Array(n);
  for (let i = 0; i < n; i++) out[i] = lo + (hi - lo) * rand();
  return out;
}

/** Glorot-style init for a fanIn x fanOut parameter block. */
export function glorot(rand: Rand, n: number, fanIn: number, fanOut: number): Float64Array {
  const bound = Math.sqrt(6 / (fanIn + fanOut));
  return uniform(rand, n, -bound, bound);
}

/** In-place Fisher-Yates shuffle. */
export function shuffle<T>(items: T[], rand: Rand): void {
  for (let i = items.length - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [items[i], items[j]] = [items[j], items[i]];
  }
}
