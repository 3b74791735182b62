/** Post-training evaluation with a degradation chain: score a default
 * prompt, fall back to simpler prompts, and as a last resort reuse a
 * training sequence, so a usable loss is reported whenever any candidate
 * yields a finite value.
 */

import { Dataset, EncodedSequence, encodeRecord } from "./dataset.js";
import { EvaluationFailureError } from "./errors.js";
import { TinyDecoder } from "./model.js";

export type EvalSource = "default-prompt" | "fallback-prompt" | "training-batch";

export interface EvalCandidate {
  source: EvalSource;
  sequence: EncodedSequence;
}

export interface EvalOutcome {
  evalLoss: number;
  evalSource: EvalSource;
}

export const DEFAULT_PROMPT =
  "The quick brown fox jumps over the lazy dog while the miller counts his sacks of grain.";

export const FALLBACK_PROMPTS = [
  "Once upon a time there was a small village by the river.",
  "The cat sat on the mat.",
];

/** Try candidates in order and return the first finite loss. A candidate
 * that throws or produces a nonfinite loss is passed over.
 */
export function chooseEvalLoss(
  candidates: EvalCandidate[],
  lossOf: (sequence: EncodedSequence) => number,
): EvalOutcome {
  for (const candidate of candidates) {
    let loss: number;
    try {
      loss = lossOf(candidate.sequence);
    } catch {
      continue;
    }
    if (Number.isFinite(loss)) {
      return { evalLoss: loss, evalSource: candidate.source };
    }
  }
  throw new EvaluationFailureError(
    `no evaluation candidate produced a finite loss (tried ${candidates.length})`,
  );
}

export function buildEvalCandidates(dataset: Dataset): EvalCandidate[] {
  const candidates: EvalCandidate[] = [];
  const defaultSeq = encodeRecord(DEFAULT_PROMPT, dataset.maxSeqLen);
  if (defaultSeq !== null) {
    candidates.push({ source: "default-prompt", sequence: defaultSeq });
  }
  for (const prompt of FALLBACK_PROMPTS) {
    const seq = encodeRecord(prompt, dataset.maxSeqLen);
    if (seq !== null) {
      candidates.push({ source: "fallback-prompt", sequence: seq });
    }
  }
  if (dataset.sequences.length > 0) {
    candidates.push({ source: "training-batch", sequence: dataset.sequences[0] });
  }
  return candidates;
}

export function evaluateModel(model: TinyDecoder, dataset: Dataset): EvalOutcome {
  return chooseEvalLoss(buildEvalCandidates(dataset), (sequence) =>
    model.lossAndGrad(sequence.inputIds, sequence.attentionMask, null),
  );
}
