/** Plain SGD training over a fixed dataset order, with gradient
 * clipping and a loss-stability guard that skips divergent batches.
 */

import { Dataset } from "./dataset.js";
import { TrainingCollapseError } from "./errors.js";
import { TinyDecoder } from "./model.js";

export interface TrainOptions {
  epochs: number;
  batchSize: number;
  learningRate: number;
  /** Batches whose mean loss is nonfinite or above this are skipped. */
  lossStabilityThreshold: number;
  gradClipNorm?: number;
}

export interface TrainResult {
  /** Mean applied-batch loss per epoch. */
  epochLosses: number[];
  /** Number of parameter updates applied. */
  steps: number;
  skippedBatches: number;
  epochsCompleted: number;
}

/** Scale grads in place so their global L2 norm is at most maxNorm.
 * Returns the norm before clipping.
 */
export function clipGradients(grads: Float64Array, maxNorm: number): number {
  let sumSq = 0;
  for (let i = 0; i < grads.length; i++) {
    sumSq += grads[i] * grads[i];
  }
  const norm = Math.sqrt(sumSq);
  if (norm > maxNorm && norm > 0) {
    const scale = maxNorm / norm;
    for (let i = 0; i < grads.length; i++) {
      grads[i] *= scale;
    }
  }
  return norm;
}

export function trainModel(
  model: TinyDecoder,
  dataset: Dataset,
  options: TrainOptions,
): TrainResult {
  const { epochs, batchSize, learningRate, lossStabilityThreshold } = options;
  const gradClipNorm = options.gradClipNorm ?? 1.0;
  const grads = new Float64Array(model.paramCount);
  const epochLosses: number[] = [];
  let steps = 0;
  let skippedBatches = 0;

  for (let epoch = 0; epoch < epochs; epoch++) {
    let epochLossSum = 0;
    let appliedBatches = 0;
    for (let start = 0; start < dataset.sequences.length; start += batchSize) {
      const batch = dataset.sequences.slice(start, start + batchSize);
      grads.fill(0);
      let lossSum = 0;
      for (const seq of batch) {
        lossSum += model.lossAndGrad(seq.inputIds, seq.attentionMask, grads);
      }
      const batchLoss = lossSum / batch.length;
      if (!Number.isFinite(batchLoss) || batchLoss > lossStabilityThreshold) {
        skippedBatches++;
        continue;
      }
      if (batch.length > 1) {
        for (let i = 0; i < grads.length; i++) {
          grads[i] /= batch.length;
        }
      }
      clipGradients(grads, gradClipNorm);
      for (let i = 0; i < grads.length; i++) {
        model.params[i] -= learningRate * grads[i];
      }
      steps++;
      epochLossSum += batchLoss;
      appliedBatches++;
    }
    if (appliedBatches === 0) {
      throw new TrainingCollapseError(
        `every batch in epoch ${epoch + 1} was skipped by the loss-stability guard ` +
          `(threshold ${lossStabilityThreshold})`,
      );
    }
    epochLosses.push(epochLossSum / appliedBatches);
  }

  return {
    epochLosses,
    steps,
    skippedBatches,
    epochsCompleted: epochs,
  };
}
