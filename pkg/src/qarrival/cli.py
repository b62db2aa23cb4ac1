"""Command-line scenario runner.

    qarrival <scenario> [--param key=value]... [--out DIR] [--seed N] [--tier T]

Exit status: 0 all checks pass, 2 usage error, 3 a check missed its
tolerance, 4 a numerical failure (non-convergence, grid too small, ...).
"""

from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__, tolerances
from .ambiguous import IllConditionedError
from .lgfine import ConstructionError
from .numerics import ConvergenceError, DomainError
from .scenarios import SCENARIOS, TIERS, execute
from .states import SupportError
from .wigner import ResolutionError

EXIT_PASS, EXIT_USAGE, EXIT_TOLERANCE, EXIT_NUMERIC = 0, 2, 3, 4

NUMERIC_ERRORS = (ConvergenceError, SupportError, ResolutionError, DomainError, ConstructionError,
                  IllConditionedError, np.linalg.LinAlgError, FloatingPointError, OverflowError,
                  MemoryError)


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    params: dict[str, str] = field(default_factory=dict)
    out: Path = Path("qarrival-out")
    seed: int = 0
    tier: str = "standard"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qarrival", description="Reproduce two-time arrival quantities.")
    p.add_argument("scenario", help=", ".join(SCENARIOS))
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--out", default="qarrival-out", type=Path)
    p.add_argument("--seed", default=0, type=int)
    p.add_argument("--tier", default="standard", choices=TIERS)
    return p


def parse_args(argv) -> RunConfig:
    ns = _parser().parse_args(argv)
    if ns.scenario not in SCENARIOS:
        raise UsageError(f"unknown scenario {ns.scenario!r}; choose from {', '.join(SCENARIOS)}")
    params = {}
    for item in ns.param:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--param expects key=value, got {item!r}")
        params[key.strip()] = value.strip()
    return RunConfig(ns.scenario, params, ns.out, ns.seed, ns.tier)


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, float) and value != value:
        return None
    return value


def _write_json(path: Path, data):
    path.write_text(json.dumps(_plain(data), indent=2, sort_keys=True, allow_nan=False) + "\n")


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def run(config: RunConfig) -> int:
    scenario = SCENARIOS[config.scenario]
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "scenario": config.scenario, "tier": config.tier, "seed": config.seed,
        "overrides": dict(sorted(config.params.items())),
        "tolerances": {s: tolerances.get(s) for s in scenario.tolerance_sections},
        "versions": {"qarrival": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__},
    }
    try:
        outcome, params, _ = execute(config.scenario, config.tier, config.seed, config.params)
    except NUMERIC_ERRORS as exc:
        meta["status"] = "numeric failure"
        meta["error"] = f"{type(exc).__name__}: {exc}"
        _write_json(out / "metadata.json", meta)
        print(f"qarrival: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"qarrival: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for name, table in outcome.tables.items():
        _write_json(out / name, table)
    for name, (header, rows) in outcome.curves.items():
        _write_csv(out / name, header, rows)
    meta["params"] = params
    meta["checks"] = [asdict(c) for c in outcome.checks]
    meta["status"] = "pass" if outcome.passed else "tolerance failure"
    meta["artifacts"] = sorted(list(outcome.tables) + list(outcome.curves))
    _write_json(out / "metadata.json", meta)
    for c in outcome.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.value:.6g} (required {c.limit})")
    return EXIT_PASS if outcome.passed else EXIT_TOLERANCE


def main(argv=None) -> int:
    try:
        config = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"qarrival: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
