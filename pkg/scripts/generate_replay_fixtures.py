#!/usr/bin/env python3
"""Generate the committed replay fixtures: recorded power traces plus
matching workload sidecars for 2 conditions x 3 trials.

These drive the fully deterministic replay path (replay backend +
builtin:replay-sidecar workload), so their exact bytes matter: rerunning
this script reproduces them bit-for-bit.

Usage: python3 scripts/generate_replay_fixtures.py
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from wattmark.orchestrator.sidecar import write_sidecar
from wattmark.power_monitor import PowerSample, PowerTrace

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "replay"
CONDITIONS = (("500K", 500000), ("1M", 1000000))
TRIALS = 3
INTERVAL_S = 60.0


def main() -> None:
    traces_dir = FIXTURES / "traces"
    sidecars_dir = FIXTURES / "sidecars"
    traces_dir.mkdir(parents=True, exist_ok=True)
    sidecars_dir.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(20240)
    for label, target in CONDITIONS:
        mtok = target / 1e6
        for index in range(TRIALS):
            trial_id = f"{label}-{index:03d}"
            sample_count = int(4 + mtok * 2 + rng.integers(0, 2))
            trace = PowerTrace(trial_id, INTERVAL_S)
            for k in range(sample_count):
                watts = 150.0 + 40.0 * mtok + float(rng.normal(0.0, 4.0))
                trace.append(PowerSample(elapsed_ms=k * 60000, watts=watts))
            trace.seal().to_csv(traces_dir / f"{trial_id}.csv")

            write_sidecar(
                sidecars_dir / f"{trial_id}.json",
                {
                    "eval_loss": round(1.32 - 0.004 * mtok + float(rng.normal(0.0, 0.008)), 9),
                    "true_tokens": int(target + rng.integers(0, 64)),
                    "epochs_completed": 3,
                    "skipped_batches": 0,
                    "param_count": 5_000_000,
                    "eval_source": "default-prompt",
                },
            )
    print(f"wrote {2 * TRIALS} traces and sidecars under {FIXTURES}")


if __name__ == "__main__":
    main()
