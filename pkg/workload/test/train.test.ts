import { describe, expect, it } from "vitest";

import { buildDataset, Dataset } from "../src/dataset.js";
import { TrainingCollapseError } from "../src/errors.js";
import { ModelConfig, TinyDecoder } from "../src/model.js";
import { Rng } from "../src/rng.js";
import { clipGradients, trainModel } from "../src/train.js";

const CONFIG: ModelConfig = { vocabSize: 257, maxSeqLen: 16, dim: 8, hiddenDim: 12 };

const RECORDS = [
  "the mill turned all day",
  "the river ran past the mill",
  "grain arrived by the cart load",
  "the keeper counted every sack",
];

function smallDataset(targetTokens = 60): Dataset {
  return buildDataset(RECORDS, { targetTokens, maxSeqLen: CONFIG.maxSeqLen, seed: 2 });
}

describe("clipGradients", () => {
  it("scales an oversized gradient down to the max norm", () => {
    const grads = Float64Array.from([3, 4]); // norm 5
    expect(clipGradients(grads, 1)).toBe(5);
    expect(Math.hypot(grads[0], grads[1])).toBeCloseTo(1, 12);
    expect(grads[0] / grads[1]).toBeCloseTo(3 / 4, 12); // direction preserved
  });

  it("leaves small gradients untouched", () => {
    const grads = Float64Array.from([0.3, 0.4]);
    expect(clipGradients(grads, 1)).toBeCloseTo(0.5, 12);
    expect(Array.from(grads)).toEqual([0.3, 0.4]);
  });
});

describe("trainModel", () => {
  it("runs the requested number of epochs without skips on a healthy setup", () => {
    const model = TinyDecoder.init(CONFIG, new Rng(1));
    const dataset = smallDataset();
    const result = trainModel(model, dataset, {
      epochs: 3,
      batchSize: 1,
      learningRate: 1e-6,
      lossStabilityThreshold: 12,
    });
    expect(result.epochsCompleted).toBe(3);
    expect(result.skippedBatches).toBe(0);
    expect(result.steps).toBe(dataset.sequences.length * 3);
    expect(result.epochLosses).toHaveLength(3);
    for (const loss of result.epochLosses) {
      expect(Number.isFinite(loss)).toBe(true);
    }
  });

  it("reduces the loss when the learning rate is meaningful", () => {
    const model = TinyDecoder.init(CONFIG, new Rng(1));
    const result = trainModel(model, smallDataset(), {
      epochs: 25,
      batchSize: 2,
      learningRate: 0.1,
      lossStabilityThreshold: 12,
    });
    const first = result.epochLosses[0];
    const last = result.epochLosses[result.epochLosses.length - 1];
    expect(last).toBeLessThan(first - 0.05);
  });

  it("skips only the batches above the stability threshold", () => {
    const model = TinyDecoder.init(CONFIG, new Rng(3));
    const dataset = smallDataset();
    const losses = dataset.sequences.map((seq) =>
      model.lossAndGrad(seq.inputIds, seq.attentionMask, null),
    );
    const sorted = [...losses].sort((a, b) => a - b);
    const threshold = (sorted[sorted.length - 2] + sorted[sorted.length - 1]) / 2;
    // Zero learning rate freezes the model, so exactly the one batch whose
    // loss sits above the midpoint threshold is skipped each epoch.
    const result = trainModel(model, dataset, {
      epochs: 2,
      batchSize: 1,
      learningRate: 0,
      lossStabilityThreshold: threshold,
    });
    expect(result.skippedBatches).toBe(2);
    expect(result.steps).toBe((dataset.sequences.length - 1) * 2);
  });

  it("fails loudly when every batch is skipped", () => {
    const model = TinyDecoder.init(CONFIG, new Rng(1));
    expect(() =>
      trainModel(model, smallDataset(), {
        epochs: 1,
        batchSize: 1,
        learningRate: 1e-6,
        lossStabilityThreshold: 0.001,
      }),
    ).toThrow(TrainingCollapseError);
  });
});
