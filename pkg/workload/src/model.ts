/** A tiny causal language model with hand-written forward and backward
 * passes over one flat parameter buffer.
 *
 * Architecture: token + position embeddings, one single-head causal
 * self-attention block, one two-layer relu MLP, both with residual
 * connections, and a linear head over the vocabulary. Loss is mean
 * cross-entropy over next-token targets at the true-token positions
 * plus the terminal end-of-sequence token.
 */

import { Rng } from "./rng.js";

export interface ModelConfig {
  vocabSize: number;
  maxSeqLen: number;
  dim: number;
  hiddenDim: number;
}

const SECTION_NAMES = [
  "tokEmb",
  "posEmb",
  "wq",
  "wk",
  "wv",
  "wo",
  "w1",
  "b1",
  "w2",
  "b2",
  "wout",
  "bout",
] as const;

type SectionName = (typeof SECTION_NAMES)[number];

function sectionSizes(config: ModelConfig): Record<SectionName, number> {
  const { vocabSize: V, maxSeqLen: T, dim: D, hiddenDim: H } = config;
  return {
    tokEmb: V * D,
    posEmb: T * D,
    wq: D * D,
    wk: D * D,
    wv: D * D,
    wo: D * D,
    w1: D * H,
    b1: H,
    w2: H * D,
    b2: D,
    wout: D * V,
    bout: V,
  };
}

export class TinyDecoder {
  readonly config: ModelConfig;
  readonly params: Float64Array;
  readonly offsets: Record<SectionName, number>;

  constructor(config: ModelConfig, params?: Float64Array) {
    for (const [name, value] of Object.entries(config)) {
      if (!Number.isInteger(value) || value <= 0) {
        throw new Error(`model ${name} must be a positive integer, got ${value}`);
      }
    }
    this.config = config;
    const sizes = sectionSizes(config);
    const offsets = {} as Record<SectionName, number>;
    let total = 0;
    for (const name of SECTION_NAMES) {
      offsets[name] = total;
      total += sizes[name];
    }
    this.offsets = offsets;
    if (params !== undefined && params.length !== total) {
      throw new Error(`expected ${total} parameters, got ${params.length}`);
    }
    this.params = params ?? new Float64Array(total);
  }

  static init(config: ModelConfig, rng: Rng, weightScale = 0.08): TinyDecoder {
    const model = new TinyDecoder(config);
    const sizes = sectionSizes(config);
    for (const name of SECTION_NAMES) {
      if (name === "b1" || name === "b2" || name === "bout") {
        continue; // biases start at zero
      }
      const start = model.offsets[name];
      for (let i = 0; i < sizes[name]; i++) {
        model.params[start + i] = rng.gaussian(0, weightScale);
      }
    }
    return model;
  }

  get paramCount(): number {
    return this.params.length;
  }

  /**
   * Mean next-token cross-entropy of one fixed-length sequence. When a
   * gradient buffer is given (same layout as params), the backward pass
   * accumulates into it; pass null for evaluation.
   */
  lossAndGrad(
    inputIds: Int32Array,
    attentionMask: Uint8Array,
    grads: Float64Array | null,
  ): number {
    const { vocabSize: V, maxSeqLen: T, dim: D, hiddenDim: H } = this.config;
    if (inputIds.length !== T || attentionMask.length !== T) {
      throw new Error(`sequence must have exactly ${T} positions`);
    }
    if (grads !== null && grads.length !== this.params.length) {
      throw new Error(
        `gradient buffer must have ${this.params.length} entries, got ${grads.length}`,
      );
    }
    const p = this.params;
    const o = this.offsets;
    const invSqrtD = 1 / Math.sqrt(D);

    // Positions whose next-token target contributes to the loss: every
    // true token's successor, plus the first padding token (the model
    // should learn to emit EOS after the last true token).
    const lossAt = new Uint8Array(T);
    let nLoss = 0;
    for (let t = 0; t + 1 < T; t++) {
      if (attentionMask[t + 1] === 1 || (attentionMask[t] === 1 && attentionMask[t + 1] === 0)) {
        lossAt[t] = 1;
        nLoss++;
      }
    }
    if (nLoss === 0) {
      throw new Error("sequence has no predictable positions");
    }

    // ---- forward -----------------------------------------------------
    const x0 = new Float64Array(T * D);
    for (let t = 0; t < T; t++) {
      const emb = o.tokEmb + inputIds[t] * D;
      const pos = o.posEmb + t * D;
      const row = t * D;
      for (let d = 0; d < D; d++) {
        x0[row + d] = p[emb + d] + p[pos + d];
      }
    }

    const q = matmul(x0, p, o.wq, T, D, D);
    const k = matmul(x0, p, o.wk, T, D, D);
    const v = matmul(x0, p, o.wv, T, D, D);

    // Causal attention weights, row t covering keys 0..t.
    const att = new Float64Array(T * T);
    for (let t = 0; t < T; t++) {
      const qRow = t * D;
      let maxScore = -Infinity;
      for (let u = 0; u <= t; u++) {
        const kRow = u * D;
        let score = 0;
        for (let d = 0; d < D; d++) {
          score += q[qRow + d] * k[kRow + d];
        }
        score *= invSqrtD;
        att[t * T + u] = score;
        if (score > maxScore) {
          maxScore = score;
        }
      }
      let norm = 0;
      for (let u = 0; u <= t; u++) {
        const w = Math.exp(att[t * T + u] - maxScore);
        att[t * T + u] = w;
        norm += w;
      }
      for (let u = 0; u <= t; u++) {
        att[t * T + u] /= norm;
      }
    }

    const attOut = new Float64Array(T * D);
    for (let t = 0; t < T; t++) {
      const outRow = t * D;
      for (let u = 0; u <= t; u++) {
        const w = att[t * T + u];
        const vRow = u * D;
        for (let d = 0; d < D; d++) {
          attOut[outRow + d] += w * v[vRow + d];
        }
      }
    }

    const x1 = matmul(attOut, p, o.wo, T, D, D);
    for (let i = 0; i < T * D; i++) {
      x1[i] += x0[i]; // residual
    }

    const h = matmul(x1, p, o.w1, T, D, H);
    for (let t = 0; t < T; t++) {
      const row = t * H;
      for (let j = 0; j < H; j++) {
        const pre = h[row + j] + p[o.b1 + j];
        h[row + j] = pre > 0 ? pre : 0;
      }
    }

    const x2 = matmul(h, p, o.w2, T, H, D);
    for (let t = 0; t < T; t++) {
      const row = t * D;
      for (let d = 0; d < D; d++) {
        x2[row + d] += p[o.b2 + d] + x1[row + d]; // bias + residual
      }
    }

    // Head, loss, and dlogits in one pass per position.
    let loss = 0;
    const dlogits = grads === null ? null : new Float64Array(T * V);
    const logitsRow = new Float64Array(V);
    for (let t = 0; t < T; t++) {
      if (lossAt[t] === 0) {
        continue;
      }
      const xRow = t * D;
      logitsRow.set(p.subarray(o.bout, o.bout + V));
      for (let d = 0; d < D; d++) {
        const xv = x2[xRow + d];
        const wRow = o.wout + d * V;
        for (let c = 0; c < V; c++) {
          logitsRow[c] += xv * p[wRow + c];
        }
      }
      let maxLogit = -Infinity;
      for (let c = 0; c < V; c++) {
        if (logitsRow[c] > maxLogit) {
          maxLogit = logitsRow[c];
        }
      }
      let sumExp = 0;
      for (let c = 0; c < V; c++) {
        sumExp += Math.exp(logitsRow[c] - maxLogit);
      }
      const target = inputIds[t + 1];
      const logSumExp = maxLogit + Math.log(sumExp);
      loss += logSumExp - logitsRow[target];
      if (dlogits !== null) {
        const dRow = t * V;
        for (let c = 0; c < V; c++) {
          dlogits[dRow + c] = Math.exp(logitsRow[c] - logSumExp) / nLoss;
        }
        dlogits[dRow + target] -= 1 / nLoss;
      }
    }
    loss /= nLoss;

    if (grads === null || dlogits === null) {
      return loss;
    }

    // ---- backward ----------------------------------------------------
    const dx2 = new Float64Array(T * D);
    for (let t = 0; t < T; t++) {
      if (lossAt[t] === 0) {
        continue;
      }
      const dRow = t * V;
      const xRow = t * D;
      for (let c = 0; c < V; c++) {
        const g = dlogits[dRow + c];
        if (g === 0) {
          continue;
        }
        grads[o.bout + c] += g;
        for (let d = 0; d < D; d++) {
          grads[o.wout + d * V + c] += x2[xRow + d] * g;
          dx2[xRow + d] += g * p[o.wout + d * V + c];
        }
      }
    }

    const dx1 = new Float64Array(dx2); // residual branch
    const dh = new Float64Array(T * H);
    for (let t = 0; t < T; t++) {
      const hRow = t * H;
      const dRow = t * D;
      for (let d = 0; d < D; d++) {
        const g = dx2[dRow + d];
        grads[o.b2 + d] += g;
        for (let j = 0; j < H; j++) {
          grads[o.w2 + j * D + d] += h[hRow + j] * g;
          dh[hRow + j] += g * p[o.w2 + j * D + d];
        }
      }
    }
    for (let i = 0; i < T * H; i++) {
      if (h[i] <= 0) {
        dh[i] = 0; // relu gate
      }
    }
    for (let t = 0; t < T; t++) {
      const hRow = t * H;
      const xRow = t * D;
      for (let j = 0; j < H; j++) {
        const g = dh[hRow + j];
        if (g === 0) {
          continue;
        }
        grads[o.b1 + j] += g;
        for (let d = 0; d < D; d++) {
          grads[o.w1 + d * H + j] += x1[xRow + d] * g;
          dx1[xRow + d] += g * p[o.w1 + d * H + j];
        }
      }
    }

    const dx0 = new Float64Array(dx1); // residual branch
    const dAttOut = new Float64Array(T * D);
    for (let t = 0; t < T; t++) {
      const row = t * D;
      for (let e = 0; e < D; e++) {
        const g = dx1[row + e];
        for (let d = 0; d < D; d++) {
          grads[o.wo + d * D + e] += attOut[row + d] * g;
          dAttOut[row + d] += g * p[o.wo + d * D + e];
        }
      }
    }

    const dq = new Float64Array(T * D);
    const dk = new Float64Array(T * D);
    const dv = new Float64Array(T * D);
    const dAttRow = new Float64Array(T);
    for (let t = 0; t < T; t++) {
      const outRow = t * D;
      let dot = 0;
      for (let u = 0; u <= t; u++) {
        const vRow = u * D;
        const w = att[t * T + u];
        let da = 0;
        for (let d = 0; d < D; d++) {
          dv[vRow + d] += w * dAttOut[outRow + d];
          da += dAttOut[outRow + d] * v[vRow + d];
        }
        dAttRow[u] = da;
        dot += w * da;
      }
      for (let u = 0; u <= t; u++) {
        const dScore = att[t * T + u] * (dAttRow[u] - dot) * invSqrtD;
        if (dScore === 0) {
          continue;
        }
        const qRow = t * D;
        const kRow = u * D;
        for (let d = 0; d < D; d++) {
          dq[qRow + d] += dScore * k[kRow + d];
          dk[kRow + d] += dScore * q[qRow + d];
        }
      }
    }

    accumulateLinearGrads(x0, dq, p, grads, o.wq, dx0, T, D, D);
    accumulateLinearGrads(x0, dk, p, grads, o.wk, dx0, T, D, D);
    accumulateLinearGrads(x0, dv, p, grads, o.wv, dx0, T, D, D);

    for (let t = 0; t < T; t++) {
      const emb = o.tokEmb + inputIds[t] * D;
      const pos = o.posEmb + t * D;
      const row = t * D;
      for (let d = 0; d < D; d++) {
        grads[emb + d] += dx0[row + d];
        grads[pos + d] += dx0[row + d];
      }
    }

    return loss;
  }
}

/** out = X (T x IN) times the parameter matrix at offset (IN x OUT). */
function matmul(
  x: Float64Array,
  params: Float64Array,
  offset: number,
  T: number,
  IN: number,
  OUT: number,
): Float64Array {
  const out = new Float64Array(T * OUT);
  for (let t = 0; t < T; t++) {
    const xRow = t * IN;
    const outRow = t * OUT;
    for (let d = 0; d < IN; d++) {
      const xv = x[xRow + d];
      if (xv === 0) {
        continue;
      }
      const wRow = offset + d * OUT;
      for (let e = 0; e < OUT; e++) {
        out[outRow + e] += xv * params[wRow + e];
      }
    }
  }
  return out;
}

/** Backward of Y = X W: dW += X^T dY and dX += dY W^T. */
function accumulateLinearGrads(
  x: Float64Array,
  dy: Float64Array,
  params: Float64Array,
  grads: Float64Array,
  offset: number,
  dx: Float64Array,
  T: number,
  IN: number,
  OUT: number,
): void {
  for (let t = 0; t < T; t++) {
    const xRow = t * IN;
    const yRow = t * OUT;
    for (let e = 0; e < OUT; e++) {
      const g = dy[yRow + e];
      if (g === 0) {
        continue;
      }
      for (let d = 0; d < IN; d++) {
        grads[offset + d * OUT + e] += x[xRow + d] * g;
        dx[xRow + d] += g * params[offset + d * OUT + e];
      }
    }
  }
}
