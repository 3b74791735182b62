"""Stand-in workload subprocess for tests and smoke runs.

Behaves like a real training client of the sidecar protocol: optionally
burns wall time, then writes a deterministic sidecar atomically. Fault
flags let tests exercise every orchestrator error path.

Usage (mirrors the orchestrator's command template):

    python3 -m wattmark.stub_workload --target-tokens {target_tokens} \
        --epochs {epochs} --seed {seed} --sidecar-path {sidecar_path}
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .orchestrator.sidecar import write_sidecar
from .orchestrator.simulate import SyntheticProfile, synthetic_outcome


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wattmark-stub-workload", description=__doc__
    )
    parser.add_argument("--target-tokens", type=int, required=True)
    parser.add_argument("--epochs", type=int, required=True)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--sidecar-path", type=Path, required=True)
    parser.add_argument(
        "--duration-s",
        type=float,
        default=0.0,
        help="wall time to burn before writing the sidecar",
    )
    parser.add_argument(
        "--exit-code",
        type=int,
        default=0,
        help="exit with this code instead of writing a sidecar (fault injection)",
    )
    parser.add_argument(
        "--skip-sidecar",
        action="store_true",
        help="exit 0 without writing a sidecar (fault injection)",
    )
    parser.add_argument(
        "--from-fixture",
        type=Path,
        default=None,
        help="copy this JSON file as the sidecar instead of generating one",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.duration_s > 0:
        time.sleep(args.duration_s)
    if args.exit_code != 0:
        print(f"stub workload failing on request with exit {args.exit_code}")
        return args.exit_code
    if args.skip_sidecar:
        return 0
    if args.from_fixture is not None:
        payload = json.loads(args.from_fixture.read_text(encoding="utf-8"))
    else:
        payload, _ = synthetic_outcome(
            args.target_tokens,
            args.epochs,
            seed=[args.seed, 0],
            profile=SyntheticProfile(),
        )
    write_sidecar(args.sidecar_path, payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
