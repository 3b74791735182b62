import { readFileSync } from "node:fs";

import { ConfigValidationError, InsufficientCorpusError } from "./errors.js";
import { Rng } from "./rng.js";
import { EOS_ID, encode } from "./tokenizer.js";

/** One fixed-length training sequence. */
export interface EncodedSequence {
  /** maxSeqLen token ids, EOS-padded on the right. */
  inputIds: Int32Array;
  /** 1 for true tokens, 0 for padding; same length as inputIds. */
  attentionMask: Uint8Array;
  /** Number of true (non-padding) tokens. */
  trueTokens: number;
}

export interface Dataset {
  sequences: EncodedSequence[];
  trueTokenCount: number;
  maxSeqLen: number;
}

/** Parse a JSONL corpus; every record must carry a non-empty "text" field. */
export function readCorpus(path: string): string[] {
  let raw: string;
  try {
    raw = readFileSync(path, "utf-8");
  } catch (error) {
    throw new ConfigValidationError(`cannot read corpus ${path}: ${error}`);
  }
  const records: string[] = [];
  const lines = raw.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) {
      continue;
    }
    let parsed: unknown;
    try {
      parsed = JSON.parse(line);
    } catch (error) {
      throw new ConfigValidationError(`${path}:${i + 1}: invalid JSON: ${error}`);
    }
    const text = (parsed as { text?: unknown }).text;
    if (typeof text !== "string" || text.length === 0) {
      throw new ConfigValidationError(
        `${path}:${i + 1}: record needs a non-empty "text" field`,
      );
    }
    records.push(text);
  }
  if (records.length === 0) {
    throw new ConfigValidationError(`corpus ${path} has no records`);
  }
  return records;
}

/** Encode one text into a fixed-length EOS-padded sequence, or null if
 * it contains no tokens at all.
 */
export function encodeRecord(text: string, maxSeqLen: number): EncodedSequence | null {
  const ids = encode(text).slice(0, maxSeqLen);
  if (ids.length === 0) {
    return null;
  }
  const inputIds = new Int32Array(maxSeqLen).fill(EOS_ID);
  const attentionMask = new Uint8Array(maxSeqLen);
  for (let t = 0; t < ids.length; t++) {
    inputIds[t] = ids[t];
    attentionMask[t] = 1;
  }
  return { inputIds, attentionMask, trueTokens: ids.length };
}

/**
 * Take corpus records in seed-shuffled order, truncating each to
 * maxSeqLen tokens and padding with EOS, until the running count of true
 * tokens reaches the target. Because every step adds at most maxSeqLen
 * tokens, the final count lands in [target, target + maxSeqLen).
 */
export function buildDataset(
  records: string[],
  options: { targetTokens: number; maxSeqLen: number; seed: number },
): Dataset {
  const { targetTokens, maxSeqLen, seed } = options;
  if (!Number.isInteger(targetTokens) || targetTokens <= 0) {
    throw new ConfigValidationError(
      `target-tokens must be a positive integer, got ${targetTokens}`,
    );
  }
  if (!Number.isInteger(maxSeqLen) || maxSeqLen <= 0) {
    throw new ConfigValidationError(
      `max-seq-len must be a positive integer, got ${maxSeqLen}`,
    );
  }

  const order = new Rng(seed).shuffle(records.map((_, index) => index));
  const sequences: EncodedSequence[] = [];
  let trueTokenCount = 0;
  for (const index of order) {
    if (trueTokenCount >= targetTokens) {
      break;
    }
    const sequence = encodeRecord(records[index], maxSeqLen);
    if (sequence === null) {
      continue;
    }
    sequences.push(sequence);
    trueTokenCount += sequence.trueTokens;
  }
  if (trueTokenCount < targetTokens) {
    throw new InsufficientCorpusError(
      `corpus holds only ${trueTokenCount} true tokens; target is ${targetTokens}`,
    );
  }
  return { sequences, trueTokenCount, maxSeqLen };
}
