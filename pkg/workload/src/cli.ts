/** Command-line entry point: train the tiny byte-level model on a JSONL
 * corpus until the requested token budget is covered, evaluate it, and
 * write the result sidecar the orchestrator ingests.
 *
 *   node dist/cli.js --target-tokens 20000 --epochs 3 --seed 11 \
 *     --sidecar-path out/sidecar.json --corpus fixtures/corpus.jsonl
 */

import { parseArgs } from "node:util";

import { validateConfig, WorkloadConfig } from "./config.js";
import { buildDataset, readCorpus } from "./dataset.js";
import { ConfigValidationError, WorkloadError } from "./errors.js";
import { evaluateModel } from "./evaluate.js";
import { TinyDecoder } from "./model.js";
import { Rng } from "./rng.js";
import { writeSidecar } from "./sidecar.js";
import { VOCAB_SIZE } from "./tokenizer.js";
import { trainModel } from "./train.js";

// Model shape is fixed: the sidecar's param_count must describe the model
// actually trained, so it is not a tuning knob.
const MODEL_DIM = 32;
const MODEL_HIDDEN_DIM = 64;

function parseNumberFlag(name: string, raw: string | undefined): number | undefined {
  if (raw === undefined) {
    return undefined;
  }
  const value = Number(raw);
  if (Number.isNaN(value)) {
    throw new ConfigValidationError(`${name} must be a number, got '${raw}'`);
  }
  return value;
}

export function parseCliConfig(argv: string[]): WorkloadConfig {
  let values: Record<string, string | undefined>;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        "target-tokens": { type: "string" },
        epochs: { type: "string" },
        seed: { type: "string" },
        "sidecar-path": { type: "string" },
        corpus: { type: "string" },
        "max-seq-len": { type: "string" },
        "batch-size": { type: "string" },
        "learning-rate": { type: "string" },
        "loss-threshold": { type: "string" },
      },
    }));
  } catch (error) {
    throw new ConfigValidationError(`invalid arguments: ${(error as Error).message}`);
  }
  return validateConfig({
    targetTokens: parseNumberFlag("target-tokens", values["target-tokens"]),
    epochs: parseNumberFlag("epochs", values.epochs),
    seed: parseNumberFlag("seed", values.seed),
    sidecarPath: values["sidecar-path"],
    corpusPath: values.corpus,
    maxSeqLen: parseNumberFlag("max-seq-len", values["max-seq-len"]),
    batchSize: parseNumberFlag("batch-size", values["batch-size"]),
    learningRate: parseNumberFlag("learning-rate", values["learning-rate"]),
    lossStabilityThreshold: parseNumberFlag("loss-threshold", values["loss-threshold"]),
  });
}

export function runWorkload(config: WorkloadConfig): void {
  const records = readCorpus(config.corpusPath);
  const dataset = buildDataset(records, {
    targetTokens: config.targetTokens,
    maxSeqLen: config.maxSeqLen,
    seed: config.seed,
  });
  const model = TinyDecoder.init(
    {
      vocabSize: VOCAB_SIZE,
      maxSeqLen: config.maxSeqLen,
      dim: MODEL_DIM,
      hiddenDim: MODEL_HIDDEN_DIM,
    },
    new Rng(config.seed),
  );
  const trained = trainModel(model, dataset, {
    epochs: config.epochs,
    batchSize: config.batchSize,
    learningRate: config.learningRate,
    lossStabilityThreshold: config.lossStabilityThreshold,
  });
  const outcome = evaluateModel(model, dataset);
  writeSidecar(config.sidecarPath, {
    eval_loss: outcome.evalLoss,
    true_tokens: dataset.trueTokenCount,
    epochs_completed: trained.epochsCompleted,
    skipped_batches: trained.skippedBatches,
    param_count: model.paramCount,
    eval_source: outcome.evalSource,
  });
  console.log(
    `trained ${dataset.trueTokenCount} tokens x ${trained.epochsCompleted} epochs ` +
      `(${trained.steps} steps, ${trained.skippedBatches} skipped); ` +
      `eval loss ${outcome.evalLoss.toFixed(4)} from ${outcome.evalSource}`,
  );
}

export function main(argv: string[]): number {
  try {
    runWorkload(parseCliConfig(argv));
    return 0;
  } catch (error) {
    if (error instanceof WorkloadError) {
      console.error(`error: ${error.message}`);
      return 1;
    }
    throw error;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
