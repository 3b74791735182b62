/** Result sidecar: a small JSON file the orchestrator ingests after the
 * training process exits. Written atomically (temp file + rename) so a
 * reader never observes a partial document.
 */

import { mkdirSync, renameSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { ConfigValidationError } from "./errors.js";
import { EvalSource } from "./evaluate.js";

export interface SidecarPayload {
  eval_loss: number;
  true_tokens: number;
  epochs_completed: number;
  skipped_batches: number;
  param_count: number;
  eval_source: EvalSource;
}

function requireInt(name: string, value: number, minimum: number): void {
  if (!Number.isInteger(value) || value < minimum) {
    throw new ConfigValidationError(
      `sidecar field ${name} must be an integer >= ${minimum}, got ${value}`,
    );
  }
}

export function validatePayload(payload: SidecarPayload): void {
  if (!Number.isFinite(payload.eval_loss)) {
    throw new ConfigValidationError(
      `sidecar field eval_loss must be finite, got ${payload.eval_loss}`,
    );
  }
  requireInt("true_tokens", payload.true_tokens, 1);
  requireInt("epochs_completed", payload.epochs_completed, 1);
  requireInt("skipped_batches", payload.skipped_batches, 0);
  requireInt("param_count", payload.param_count, 1);
}

export function writeSidecar(path: string, payload: SidecarPayload): void {
  validatePayload(payload);
  const body = JSON.stringify(payload, null, 2) + "\n";
  mkdirSync(dirname(path), { recursive: true });
  const tmpPath = `${path}.tmp-${process.pid}`;
  writeFileSync(tmpPath, body, "utf-8");
  renameSync(tmpPath, path);
}
