/* Reverse-mode autograd over flat Float64Array storage.
 *
 * Define-by-run: every op returns a new Tensor holding its parents and a
 * closure that routes the output gradient back to them. backward() does an
 * iterative topological walk, so long recurrent chains cannot overflow the
 * stack. Shapes are plain number[] with row-major layout; ops validate only
 * what they rely on.
 */

let gradEnabled = true;

/** Run f with gradient recording switched off (inference, target building). */
export function noGrad<T>(f: () => T): T {
  const prev = gradEnabled;
  gradEnabled = false;
  try {
    return f();
  } finally {
    gradEnabled = prev;
  }
}

export class Tensor {
  data: Float64Array;
  shape: number[];
  grad: Float64Array | null = null;
  requiresGrad: boolean;
  parents: Tensor[] = [];
  backwardFn: (() => void) | null = null;

  constructor(data: Float64Array, shape: number[], requiresGrad = false) {
    const n = shape.reduce((a, b) => a * b, 1);
    if (data.length !== n) {
      throw new Error(`data length ${data.length} does not match shape [${shape}]`);
    }
    this.data = data;
    this.shape = shape;
    this.requiresGrad = requiresGrad;
  }

  get size(): number {
    return this.data.length;
  }

  ensureGrad(): Float64Array {
    if (this.grad === null) this.grad = new Float64Array(this.data.length);
    return this.grad;
  }

  zeroGrad(): void {
    if (this.grad !== null) this.grad.fill(0);
  }

  item(): number {
    if (this.data.length !== 1) throw new Error(`item() on tensor of size ${this.data.length}`);
    return this.data[0];
  }

  /** Backpropagate from this tensor; seeds with ones (scalar outputs in practice). */
  backward(): void {
    const order: Tensor[] = [];
    const seen = new Set<Tensor>();
    const stack: Array<[Tensor, boolean]> = [[this, false]];
    while (stack.length > 0) {
      const [node, expanded] = stack.pop()!;
      if (expanded) {
        order.push(node);
        continue;
      }
      if (seen.has(node)) continue;
      seen.add(node);
      stack.push([node, true]);
      for (const p of node.parents) {
        if (!seen.has(p)) stack.push([p, false]);
      }
    }
    this.ensureGrad().fill(1);
    for (let i = order.length - 1; i >= 0; i--) {
      const node = order[i];
      if (node.backwardFn !== null && node.grad !== null) node.backwardFn();
    }
  }
}

export function tensor(values: number[] | Float64Array, shape?: number[], requiresGrad = false): Tensor {
  const data = values instanceof Float64Array ? values : Float64Array.from(values);
  return new Tensor(data, shape ?? [data.length], requiresGrad);
}

export function zeros(shape: number[], requiresGrad = false): Tensor {
  const n = shape.reduce((a, b) => a * b, 1);
  return new Tensor(new Float64Array(n), shape, requiresGrad);
}

function node(data: Float64Array, shape: number[], parents: Tensor[], backwardFn: (out: Tensor) => () => void): Tensor {
  const out = new Tensor(data, shape);
  if (gradEnabled && parents.some((p) => p.requiresGrad)) {
    out.requiresGrad = true;
    out.parents = parents;
    out.backwardFn = backwardFn(out);
  }
  return out;
}

function sameShape(a: Tensor, b: Tensor, op: string): void {
  if (a.data.length !== b.data.length) {
    throw new Error(`${op}: shape mismatch [${a.shape}] vs [${b.shape}]`);
  }
}

// ---------------------------------------------------------------- elementwise

export function add(a: Tensor, b: Tensor): Tensor {
  sameShape(a, b, "add");
  const d = new Float64Array(a.size);
  for (let i = 0; i < d.length; i++) d[i] = a.data[i] + b.data[i];
  return node(d, a.shape, [a, b], (out) => () => {
    const g = out.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < g.length; i++) ga[i] += g[i];
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let i = 0; i < g.length; i++) gb[i] += g[i];
    }
  });
}

export function sub(a: Tensor, b: Tensor): Tensor {
  sameShape(a, b, "sub");
  const d = new Float64Array(a.size);
  for (let i = 0; i < d.length; i++) d[i] = a.data[i] - b.data[i];
  return node(d, a.shape, [a, b], (out) => () => {
    const g = out.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < g.length; i++) ga[i] += g[i];
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let i = 0; i < g.length; i++) gb[i] -= g[i];
    }
  });
}

export function mul(a: Tensor, b: Tensor): Tensor {
  sameShape(a, b, "mul");
  const d = new Float64Array(a.size);
  for (let i = 0; i < d.length; i++) d[i] = a.data[i] * b.data[i];
  return node(d, a.shape, [a, b], (out) => () => {
    const g = out.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < g.length; i++) ga[i] += g[i] * b.data[i];
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let i = 0; i < g.length; i++) gb[i] += g[i] * a.data[i];
    }
  });
}

export function scale(a: Tensor, c: number): Tensor {
  const d = new Float64Array(a.size);
  for (let i = 0; i < d.length; i++) d[i] = a.data[i] * c;
  return node(d, a.shape, [a], (out) => () => {
    const g = out.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < g.length; i++) ga[i] += g[i] * c;
  });
}

export function addScalar(a: Tensor, c: number): Tensor {
  const d = new Float64Array(a.size);
  for (let i = 0; i < d.length; i++) d[i] = a.data[i] + c;
  return node(d, a.shape, [a], (out) => () => {
    const g = out.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < g.length; i++) ga[i] += g[i];
  });
}

/** Elementwise multiply by a constant mask (dropout); mask gets no gradient. */
export function mulMask(a: Tensor, mask: Float64Array): Tensor {
  if (mask.length !== a.size) throw new Error("mulMask: mask length mismatch");
  const d = new Float64Array(a.size);
  for (let i = 0; i < d.length; i++) d[i] = a.data[i] * mask[i];
  return node(d, a.shape, [a], (out) => () => {
    const g = out.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < g.length; i++) ga[i] += g[i] * mask[i];
  });
}

function unary(a: Tensor, fwd: (x: number) => number, dfdx: (x: number, y: number) => number): Tensor {
  const d = new Float64Array(a.size);
  for (let i = 0; i < d.length; i++) d[i] = fwd(a.data[i]);
  return node(d, a.shape, [a], (out) => () => {
    const g = out.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < g.length; i++) ga[i] += g[i] * dfdx(a.data[i], out.data[i]);
  });
}

export function tanh(a: Tensor): Tensor {
  return unary(a, Math.tanh, (_x, y) => 1 - y * y);
}

export function sigmoid(a: Tensor): Tensor {
  const f = (x: number) => (x >= 0 ? 1 / (1 + Math.exp(-x)) : Math.exp(x) / (1 + Math.exp(x)));
  return unary(a, f, (_x, y) => y * (1 - y));
}

export function relu(a: Tensor): Tensor {
  return unary(a, (x) => (x > 0 ? x : 0), (x) => (x > 0 ? 1 : 0));
}

export function exp(a: Tensor): Tensor {
  return unary(a, Math.exp, (_x, y) => y);
}

export function log(a: Tensor): Tensor {
  return unary(a, Math.log, (x) => 1 / x);
}

export function sqrt(a: Tensor): Tensor {
  return unary(a, Math.sqrt, (_x, y) => 0.5 / y);
}

// ---------------------------------------------------------------- reductions

export function sum(a: Tensor): Tensor {
  let s = 0;
  for (let i = 0; i < a.size; i++) s += a.data[i];
  return node(Float64Array.of(s), [1], [a], (out) => () => {
    const g = out.grad![0];
    const ga = a.ensureGrad();
    for (let i = 0; i < ga.length; i++) ga[i] += g;
  });
}

export function mean(a: Tensor): Tensor {
  const n = a.size;
  let s = 0;
  for (let i = 0; i < n; i++) s += a.data[i];
  return node(Float64Array.of(s / n), [1], [a], (out) => () => {
    const g = out.grad![0] / n;
    const ga = a.ensureGrad();
    for (let i = 0; i < ga.length; i++) ga[i] += g;
  });
}

function rows2d(a: Tensor, op: string): [number, number] {
  if (a.shape.length !== 2) throw new Error(`${op}: expected 2-d tensor, got [${a.shape}]`);
  return [a.shape[0], a.shape[1]];
}

/** Mean over the last dimension: [n, d] -> [n]. */
export function meanLastDim(a: Tensor): Tensor {
  const [n, dDim] = rows2d(a, "meanLastDim");
  const out = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    let s = 0;
    for (let j = 0; j < dDim; j++) s += a.data[i * dDim + j];
    out[i] = s / dDim;
  }
  return node(out, [n], [a], (o) => () => {
    const g = o.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < n; i++) {
      const gi = g[i] / dDim;
      for (let j = 0; j < dDim; j++) ga[i * dDim + j] += gi;
    }
  });
}

/** Mean over rows: [n, d] -> [d]. */
export function meanCols(a: Tensor): Tensor {
  const [n, dDim] = rows2d(a, "meanCols");
  const out = new Float64Array(dDim);
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < dDim; j++) out[j] += a.data[i * dDim + j];
  }
  for (let j = 0; j < dDim; j++) out[j] /= n;
  return node(out, [dDim], [a], (o) => () => {
    const g = o.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < n; i++) {
      for (let j = 0; j < dDim; j++) ga[i * dDim + j] += g[j] / n;
    }
  });
}

// ------------------------------------------------------------- broadcasting

type ColCombine = (x: number, v: number) => number;

function colVecOp(
  a: Tensor,
  v: Tensor,
  op: string,
  fwd: ColCombine,
  dX: (x: number, v: number) => number,
  dV: (x: number, v: number) => number,
): Tensor {
  const [n, dDim] = rows2d(a, op);
  if (v.size !== n) throw new Error(`${op}: vector length ${v.size} != rows ${n}`);
  const out = new Float64Array(a.size);
  for (let i = 0; i < n; i++) {
    const vi = v.data[i];
    for (let j = 0; j < dDim; j++) out[i * dDim + j] = fwd(a.data[i * dDim + j], vi);
  }
  return node(out, a.shape, [a, v], (o) => () => {
    const g = o.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < n; i++) {
        const vi = v.data[i];
        for (let j = 0; j < dDim; j++) {
          const k = i * dDim + j;
          ga[k] += g[k] * dX(a.data[k], vi);
        }
      }
    }
    if (v.requiresGrad) {
      const gv = v.ensureGrad();
      for (let i = 0; i < n; i++) {
        const vi = v.data[i];
        let s = 0;
        for (let j = 0; j < dDim; j++) {
          const k = i * dDim + j;
          s += g[k] * dV(a.data[k], vi);
        }
        gv[i] += s;
      }
    }
  });
}

/** a[i][j] - v[i] */
export function subColVec(a: Tensor, v: Tensor): Tensor {
  return colVecOp(a, v, "subColVec", (x, vi) => x - vi, () => 1, () => -1);
}

/** a[i][j] / v[i] */
export function divColVec(a: Tensor, v: Tensor): Tensor {
  return colVecOp(a, v, "divColVec", (x, vi) => x / vi, (_x, vi) => 1 / vi, (x, vi) => -x / (vi * vi));
}

/** a[i][j] * v[i] */
export function mulColVec(a: Tensor, v: Tensor): Tensor {
  return colVecOp(a, v, "mulColVec", (x, vi) => x * vi, (_x, vi) => vi, (x) => x);
}

function rowVecOp(
  a: Tensor,
  v: Tensor,
  op: string,
  fwd: ColCombine,
  dX: (x: number, v: number) => number,
  dV: (x: number, v: number) => number,
): Tensor {
  const [n, dDim] = rows2d(a, op);
  if (v.size !== dDim) throw new Error(`${op}: vector length ${v.size} != cols ${dDim}`);
  const out = new Float64Array(a.size);
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < dDim; j++) {
      out[i * dDim + j] = fwd(a.data[i * dDim + j], v.data[j]);
    }
  }
  return node(out, a.shape, [a, v], (o) => () => {
    const g = o.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < n; i++) {
        for (let j = 0; j < dDim; j++) {
          const k = i * dDim + j;
          ga[k] += g[k] * dX(a.data[k], v.data[j]);
        }
      }
    }
    if (v.requiresGrad) {
      const gv = v.ensureGrad();
      for (let i = 0; i < n; i++) {
        for (let j = 0; j < dDim; j++) {
          const k = i * dDim + j;
          gv[j] += g[k] * dV(a.data[k], v.data[j]);
        }
      }
    }
  });
}

/** a[i][j] + v[j] (bias add) */
export function addRowVec(a: Tensor, v: Tensor): Tensor {
  return rowVecOp(a, v, "addRowVec", (x, vj) => x + vj, () => 1, () => 1);
}

/** a[i][j] - v[j] */
export function subRowVec(a: Tensor, v: Tensor): Tensor {
  return rowVecOp(a, v, "subRowVec", (x, vj) => x - vj, () => 1, () => -1);
}

/** a[i][j] * v[j] */
export function mulRowVec(a: Tensor, v: Tensor): Tensor {
  return rowVecOp(a, v, "mulRowVec", (x, vj) => x * vj, (_x, vj) => vj, (x) => x);
}

/** a[i][j] / v[j] */
export function divRowVec(a: Tensor, v: Tensor): Tensor {
  return rowVecOp(a, v, "divRowVec", (x, vj) => x / vj, (_x, vj) => 1 / vj, (x, vj) => -x / (vj * vj));
}

// ------------------------------------------------------------ linear algebra

export function matmul(a: Tensor, b: Tensor): Tensor {
  const [m, k] = rows2d(a, "matmul");
  const [k2, n] = rows2d(b, "matmul");
  if (k !== k2) throw new Error(`matmul: inner dims ${k} vs ${k2}`);
  const out = new Float64Array(m * n);
  for (let i = 0; i < m; i++) {
    for (let p = 0; p < k; p++) {
      const av = a.data[i * k + p];
      if (av === 0) continue;
      const bRow = p * n;
      const oRow = i * n;
      for (let j = 0; j < n; j++) out[oRow + j] += av * b.data[bRow + j];
    }
  }
  return node(out, [m, n], [a, b], (o) => () => {
    const g = o.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < m; i++) {
        for (let p = 0; p < k; p++) {
          let s = 0;
          const bRow = p * n;
          const oRow = i * n;
          for (let j = 0; j < n; j++) s += g[oRow + j] * b.data[bRow + j];
          ga[i * k + p] += s;
        }
      }
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let i = 0; i < m; i++) {
        const oRow = i * n;
        for (let p = 0; p < k; p++) {
          const av = a.data[i * k + p];
          if (av === 0) continue;
          const bRow = p * n;
          for (let j = 0; j < n; j++) gb[bRow + j] += av * g[oRow + j];
        }
      }
    }
  });
}

// -------------------------------------------------------- shuffling / gather

export function concatCols(parts: Tensor[]): Tensor {
  if (parts.length === 0) throw new Error("concatCols: no parts");
  const n = parts[0].shape[0];
  const widths = parts.map((p) => {
    const [pn, pd] = rows2d(p, "concatCols");
    if (pn !== n) throw new Error("concatCols: row count mismatch");
    return pd;
  });
  const total = widths.reduce((a, b) => a + b, 0);
  const out = new Float64Array(n * total);
  let off = 0;
  for (let pi = 0; pi < parts.length; pi++) {
    const p = parts[pi];
    const w = widths[pi];
    for (let i = 0; i < n; i++) {
      out.set(p.data.subarray(i * w, (i + 1) * w), i * total + off);
    }
    off += w;
  }
  return node(out, [n, total], parts.slice(), (o) => () => {
    const g = o.grad!;
    let base = 0;
    for (let pi = 0; pi < parts.length; pi++) {
      const p = parts[pi];
      const w = widths[pi];
      if (p.requiresGrad) {
        const gp = p.ensureGrad();
        for (let i = 0; i < n; i++) {
          for (let j = 0; j < w; j++) gp[i * w + j] += g[i * total + base + j];
        }
      }
      base += w;
    }
  });
}

export function sliceCols(a: Tensor, start: number, end: number): Tensor {
  const [n, dDim] = rows2d(a, "sliceCols");
  if (start < 0 || end > dDim || start >= end) throw new Error(`sliceCols: bad range ${start}..${end} of ${dDim}`);
  const w = end - start;
  const out = new Float64Array(n * w);
  for (let i = 0; i < n; i++) {
    out.set(a.data.subarray(i * dDim + start, i * dDim + end), i * w);
  }
  return node(out, [n, w], [a], (o) => () => {
    const g = o.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < n; i++) {
      for (let j = 0; j < w; j++) ga[i * dDim + start + j] += g[i * w + j];
    }
  });
}

/** Stack k row vectors (shape [d] or [1, d]) into [k, d]. */
export function stackRows(rows: Tensor[]): Tensor {
  if (rows.length === 0) throw new Error("stackRows: no rows");
  const d = rows[0].size;
  for (const r of rows) {
    if (r.size !== d) throw new Error("stackRows: width mismatch");
  }
  const out = new Float64Array(rows.length * d);
  for (let i = 0; i < rows.length; i++) out.set(rows[i].data, i * d);
  return node(out, [rows.length, d], rows.slice(), (o) => () => {
    const g = o.grad!;
    for (let i = 0; i < rows.length; i++) {
      const r = rows[i];
      if (!r.requiresGrad) continue;
      const gr = r.ensureGrad();
      for (let j = 0; j < d; j++) gr[j] += g[i * d + j];
    }
  });
}

/** Row lookup with scatter-add backward: table [V, d], idx -> [idx.length, d]. */
export function gatherRows(table: Tensor, idx: Int32Array | number[]): Tensor {
  const [v, dDim] = rows2d(table, "gatherRows");
  const n = idx.length;
  const out = new Float64Array(n * dDim);
  for (let i = 0; i < n; i++) {
    const r = idx[i];
    if (r < 0 || r >= v) throw new Error(`gatherRows: index ${r} out of range 0..${v - 1}`);
    out.set(table.data.subarray(r * dDim, (r + 1) * dDim), i * dDim);
  }
  return node(out, [n, dDim], [table], (o) => () => {
    const g = o.grad!;
    const gt = table.ensureGrad();
    for (let i = 0; i < n; i++) {
      const r = idx[i];
      for (let j = 0; j < dDim; j++) gt[r * dDim + j] += g[i * dDim + j];
    }
  });
}

// -------------------------------------------------------------- convolution

/**
 * 2-d convolution with same padding over a [l, l, cIn] grid.
 * weight [kh, kw, cIn, cOut], bias [cOut]; output [l, l, cOut].
 */
export function conv2dSame(x: Tensor, weight: Tensor, bias: Tensor): Tensor {
  if (x.shape.length !== 3 || x.shape[0] !== x.shape[1]) {
    throw new Error(`conv2dSame: expected square [l, l, c] input, got [${x.shape}]`);
  }
  if (weight.shape.length !== 4) throw new Error("conv2dSame: weight must be [kh, kw, cIn, cOut]");
  const [l, , cIn] = x.shape;
  const [kh, kw, wcIn, cOut] = weight.shape;
  if (wcIn !== cIn) throw new Error(`conv2dSame: channel mismatch ${wcIn} vs ${cIn}`);
  if (bias.size !== cOut) throw new Error("conv2dSame: bias length mismatch");
  const ph = (kh - 1) >> 1;
  const pw = (kw - 1) >> 1;
  const out = new Float64Array(l * l * cOut);
  for (let i = 0; i < l; i++) {
    for (let j = 0; j < l; j++) {
      const oBase = (i * l + j) * cOut;
      for (let co = 0; co < cOut; co++) out[oBase + co] = bias.data[co];
      for (let di = 0; di < kh; di++) {
        const ii = i + di - ph;
        if (ii < 0 || ii >= l) continue;
        for (let dj = 0; dj < kw; dj++) {
          const jj = j + dj - pw;
          if (jj < 0 || jj >= l) continue;
          const xBase = (ii * l + jj) * cIn;
          const wBase = (di * kw + dj) * cIn * cOut;
          for (let ci = 0; ci < cIn; ci++) {
            const xv = x.data[xBase + ci];
            if (xv === 0) continue;
            const wRow = wBase + ci * cOut;
            for (let co = 0; co < cOut; co++) out[oBase + co] += xv * weight.data[wRow + co];
          }
        }
      }
    }
  }
  return node(out, [l, l, cOut], [x, weight, bias], (o) => () => {
    const g = o.grad!;
    const gx = x.requiresGrad ? x.ensureGrad() : null;
    const gw = weight.requiresGrad ? weight.ensureGrad() : null;
    const gb = bias.requiresGrad ? bias.ensureGrad() : null;
    for (let i = 0; i < l; i++) {
      for (let j = 0; j < l; j++) {
        const oBase = (i * l + j) * cOut;
        if (gb !== null) {
          for (let co = 0; co < cOut; co++) gb[co] += g[oBase + co];
        }
        for (let di = 0; di < kh; di++) {
          const ii = i + di - ph;
          if (ii < 0 || ii >= l) continue;
          for (let dj = 0; dj < kw; dj++) {
            const jj = j + dj - pw;
            if (jj < 0 || jj >= l) continue;
            const xBase = (ii * l + jj) * cIn;
            const wBase = (di * kw + dj) * cIn * cOut;
            for (let ci = 0; ci < cIn; ci++) {
              const wRow = wBase + ci * cOut;
              let sx = 0;
              for (let co = 0; co < cOut; co++) {
                const go = g[oBase + co];
                sx += go * weight.data[wRow + co];
                if (gw !== null) gw[wRow + co] += go * x.data[xBase + ci];
              }
              if (gx !== null) gx[xBase + ci] += sx;
            }
          }
        }
      }
    }
  });
}

/** View a [l, l, c] grid as [l*l, c] rows (no copy semantics needed; data is shared layout). */
export function asRows(a: Tensor): Tensor {
  if (a.shape.length !== 3) throw new Error("asRows: expected 3-d tensor");
  const [l, l2, c] = a.shape;
  return reshape(a, [l * l2, c]);
}

export function reshape(a: Tensor, shape: number[]): Tensor {
  const n = shape.reduce((x, y) => x * y, 1);
  if (n !== a.size) throw new Error(`reshape: size mismatch [${a.shape}] -> [${shape}]`);
  return node(a.data.slice(), shape, [a], (o) => () => {
    const g = o.grad!;
    const ga = a.ensureGrad();
    for (let i = 0; i < g.length; i++) ga[i] += g[i];
  });
}
