"""Command-line entry point: ``qlan <experiment> --config cfg.json [--seed S] [--reps R] [--out path]``.

Each run writes one JSON report (to ``--out`` or stdout) and appends a row to a campaign CSV.
Exit codes: 0 success, 1 invalid configuration, 2 failed verification checks.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from pydantic import ValidationError

from .harness import EXPERIMENTS, ExperimentConfig, run
from .reports import CAMPAIGN_COLUMNS, RiskReport, VerificationReport

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlan", description="Low-rank qudit estimation experiments.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path, help="JSON experiment configuration")
        p.add_argument("--seed", type=int)
        p.add_argument("--reps", type=int)
        p.add_argument("--out", type=Path, help="JSON report path (default: stdout)")
        p.add_argument("--campaign", type=Path,
                       help="campaign CSV to append to (default: campaign.csv beside the report)")
    return parser


def load_config(path: Path, experiment: str, overrides: dict) -> ExperimentConfig:
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, dict):
        raise ValueError("configuration must be a JSON object")
    declared = raw.setdefault("experiment", experiment)
    if declared != experiment:
        raise ValueError(f"config declares experiment {declared!r} but {experiment!r} was requested")
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.model_validate(raw)


def _campaign_row(result, cfg: ExperimentConfig) -> dict:
    if isinstance(result, RiskReport):
        return result.campaign_row()
    n_failed = len(result.failures())
    return {
        "experiment": cfg.experiment, "d": cfg.d, "r": cfg.r, "n": cfg.n_max, "reps": len(result.records),
        "seed": cfg.seed, "mc_estimate": n_failed, "mc_stderr": 0.0, "theory": 0,
        "elapsed_ms": round(result.elapsed_ms, 3),
    }


def append_campaign(path: Path, row: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not path.exists() or path.stat().st_size == 0
    with path.open("a", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=CAMPAIGN_COLUMNS)
        if fresh:
            writer.writeheader()
        writer.writerow(row)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"seed": args.seed, "reps": args.reps, "out": str(args.out) if args.out else None}
    try:
        cfg = load_config(args.config, args.experiment, overrides)
    except (OSError, ValueError, ValidationError) as exc:
        print(f"qlan: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    result = run(cfg)
    payload = json.dumps(result.to_dict(), indent=2, sort_keys=True)
    out = Path(cfg.out) if cfg.out else None
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(payload + "\n")
    else:
        print(payload)
    campaign = args.campaign or ((out.parent if out else Path.cwd()) / "campaign.csv")
    append_campaign(campaign, _campaign_row(result, cfg))

    if isinstance(result, VerificationReport) and not result.passed:
        for rec in result.failures():
            print(f"qlan: check failed: {rec.check} {rec.shape} residual={rec.residual:.3e}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
