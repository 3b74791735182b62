/** Typed failures the workload can exit with. */

export class WorkloadError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** A flag or config value is missing, mistyped, or out of range. */
export class ConfigValidationError extends WorkloadError {}

/** The corpus ran out before the true-token target was reached. */
export class InsufficientCorpusError extends WorkloadError {}

/** Every batch of an epoch was skipped; the run has nothing to report. */
export class TrainingCollapseError extends WorkloadError {}

/** No evaluation path produced a finite loss; no sidecar is written. */
export class EvaluationFailureError extends WorkloadError {}
