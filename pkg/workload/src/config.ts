import { ConfigValidationError } from "./errors.js";

/** Everything one training run needs; validated before any work starts. */
export interface WorkloadConfig {
  targetTokens: number;
  epochs: number;
  maxSeqLen: number;
  batchSize: number;
  learningRate: number;
  lossStabilityThreshold: number;
  seed: number;
  sidecarPath: string;
  corpusPath: string;
}

export const DEFAULTS = {
  epochs: 3,
  maxSeqLen: 64,
  batchSize: 1,
  learningRate: 1e-6,
  // Far above any healthy byte-level loss (ln 257 ~ 5.55 at init), so only
  // genuine blow-ups trip it.
  lossStabilityThreshold: 12.0,
  seed: 0,
} as const;

function requirePositiveInt(name: string, value: number): number {
  if (!Number.isInteger(value) || value <= 0) {
    throw new ConfigValidationError(`${name} must be a positive integer, got ${value}`);
  }
  return value;
}

function requirePositive(name: string, value: number): number {
  if (typeof value !== "number" || !Number.isFinite(value) || value <= 0) {
    throw new ConfigValidationError(`${name} must be a positive number, got ${value}`);
  }
  return value;
}

export function validateConfig(raw: Partial<WorkloadConfig>): WorkloadConfig {
  if (raw.targetTokens === undefined) {
    throw new ConfigValidationError("target-tokens is required");
  }
  if (!raw.sidecarPath) {
    throw new ConfigValidationError("sidecar-path is required");
  }
  if (!raw.corpusPath) {
    throw new ConfigValidationError("corpus is required");
  }
  if (raw.seed !== undefined && !Number.isInteger(raw.seed)) {
    throw new ConfigValidationError(`seed must be an integer, got ${raw.seed}`);
  }
  return {
    targetTokens: requirePositiveInt("target-tokens", raw.targetTokens),
    epochs: requirePositiveInt("epochs", raw.epochs ?? DEFAULTS.epochs),
    maxSeqLen: requirePositiveInt("max-seq-len", raw.maxSeqLen ?? DEFAULTS.maxSeqLen),
    batchSize: requirePositiveInt("batch-size", raw.batchSize ?? DEFAULTS.batchSize),
    learningRate: requirePositive(
      "learning-rate", raw.learningRate ?? DEFAULTS.learningRate,
    ),
    lossStabilityThreshold: requirePositive(
      "loss-threshold", raw.lossStabilityThreshold ?? DEFAULTS.lossStabilityThreshold,
    ),
    seed: raw.seed ?? DEFAULTS.seed,
    sidecarPath: raw.sidecarPath,
    corpusPath: raw.corpusPath,
  };
}
