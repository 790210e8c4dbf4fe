"""Command-line entry point ``casimir``.

``casimir run`` evaluates a sweep described by a JSON configuration or a
figure preset and writes CSV or JSON. ``casimir verify`` runs the oracle
suite. Exit status: 0 on success, 1 when a channel failed to converge or a
verification check failed, 2 for invalid usage or configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from . import te, tm
from .config import OutputSpec, RunConfig, load_config, scenario_configs, SCENARIOS
from .errors import CasimirError, ConfigError, ConvergenceError
from .oracle import verify
from .quadrature import QuadratureSpec
from .results import EnergyResult, combine
from .stack import StackConfig

logger = logging.getLogger("proca_casimir")

CSV_COLUMNS = ("param_name", "param_value", "channel", "energy_J_per_m2", "force_Pa", "error_estimate", "evals")
PARTIAL_SUFFIX = ":partial"

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}

_CHANNEL_FUNCTIONS = {
    "TE": (te.te_energy, te.te_force),
    "TM": (tm.tm_energy, tm.tm_force),
    "TM_I": (tm.tm_first_polarization_energy, tm.tm_first_polarization_force),
    "TM_II": (tm.tm_second_polarization_energy, tm.tm_second_polarization_force),
}


@dataclass(frozen=True)
class Row:
    """One sweep point of one channel."""

    param_name: str
    param_value: float
    channel: str
    energy: float
    force: float
    energy_error: float
    force_error: float
    evals: int
    converged: bool

    def csv_fields(self) -> list[str]:
        channel = self.channel if self.converged else self.channel + PARTIAL_SUFFIX
        return [self.param_name, repr(self.param_value), channel, repr(self.energy), repr(self.force),
                repr(self.force_error), str(self.evals)]

    def to_dict(self) -> dict:
        return {"param_name": self.param_name, "param_value": self.param_value, "channel": self.channel,
                "energy_J_per_m2": self.energy, "force_Pa": self.force,
                "energy_error_J_per_m2": self.energy_error, "error_estimate": self.force_error,
                "evals": self.evals, "converged": self.converged}


def _attempt(fn, stack: StackConfig, quad: QuadratureSpec) -> tuple[EnergyResult, bool]:
    try:
        return fn(stack, quad), True
    except ConvergenceError as exc:
        logger.error("%s: %s", fn.__name__, exc)
        return exc.partial, False


def evaluate_point(stack: StackConfig, channels: Sequence[str], quad: QuadratureSpec,
                   param_name: str, param_value: float) -> list[Row]:
    """Energy and force of each requested channel at one stack."""
    cache: dict[str, tuple[EnergyResult, EnergyResult, bool]] = {}

    def channel(name):
        if name not in cache:
            if name == "total":
                parts = [channel("TE"), channel("TM")]
                cache[name] = (combine([p[0] for p in parts], "total"),
                               combine([p[1] for p in parts], "total"),
                               all(p[2] for p in parts))
            else:
                energy_fn, force_fn = _CHANNEL_FUNCTIONS[name]
                energy, ok_e = _attempt(energy_fn, stack, quad)
                force, ok_f = _attempt(force_fn, stack, quad)
                cache[name] = (energy, force, ok_e and ok_f)
        return cache[name]

    rows = []
    for name in channels:
        energy, force, ok = channel(name)
        rows.append(Row(param_name, param_value, name, energy.value, force.value, energy.error_estimate,
                        force.error_estimate, energy.evaluations + force.evaluations, ok))
    return rows


def _point_task(args) -> list[Row]:
    return evaluate_point(*args)


def sweep_rows(config: RunConfig) -> list[Row]:
    """Evaluate every sweep point; rows come back in sweep order for any worker count."""
    sweep = config.sweep
    tasks = [(sweep.apply(config.stack, x), config.channels, config.quad, sweep.param_name, x)
             for x in sweep.values()]
    if config.parallelism > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.parallelism) as pool:
            chunks = list(pool.map(_point_task, tasks))
    else:
        chunks = [_point_task(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def format_csv(rows: Sequence[Row]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()


def format_json(rows: Sequence[Row], config: RunConfig) -> str:
    doc = {
        "schema": 1,
        "param_name": config.sweep.param_name,
        "converged": all(r.converged for r in rows),
        "config": config.to_dict(),
        "rows": [r.to_dict() for r in rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def run(config: RunConfig) -> int:
    """Evaluate ``config`` and write its output; returns the exit status."""
    rows = sweep_rows(config)
    text = format_csv(rows) if config.output.format == "csv" else format_json(rows, config)
    if config.output.path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(config.output.path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        logger.info("wrote %d rows to %s", len(rows), config.output.path)
    failed = sum(not r.converged for r in rows)
    if failed:
        logger.error("%d rows did not converge and are flagged %r", failed, PARTIAL_SUFFIX)
        return 1
    return 0


def _suffixed(path: str, suffix: str) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}_{suffix}{ext}"


def _configure_logging() -> None:
    name = os.environ.get("CASIMIR_LOG", "warn").strip().lower()
    level = _LOG_LEVELS.get(name, logging.WARNING)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("proca_casimir")
    root.handlers[:] = [handler]
    root.setLevel(level)
    root.propagate = False
    if name not in _LOG_LEVELS:
        logger.warning("CASIMIR_LOG=%r not recognised; using warn", name)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casimir",
        description="Casimir energy and force of a massive vector field between two plates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evaluate a sweep from a config file or a figure preset")
    p_run.add_argument("--config", help="JSON run configuration")
    p_run.add_argument("--scenario", choices=sorted(SCENARIOS),
                       help="figure preset; writes one file per background index")
    p_run.add_argument("--output", help="output path ('-' for stdout)")
    p_run.add_argument("--format", choices=("csv", "json"))
    p_run.add_argument("--parallelism", type=int, help="worker processes")

    p_verify = sub.add_parser("verify", help="run the oracle suite")
    p_verify.add_argument("--level", choices=("quick", "full"), default="quick")
    p_verify.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _run_command(args, parser: argparse.ArgumentParser) -> int:
    if args.config is None and args.scenario is None:
        parser.error("run needs --config or --scenario")
    if args.parallelism is not None and args.parallelism < 1:
        parser.error("--parallelism must be >= 1")
    base = load_config(args.config) if args.config else None

    def override(cfg: RunConfig, path: Optional[str]) -> RunConfig:
        fmt = args.format or cfg.output.format
        cfg = replace(cfg, output=OutputSpec(fmt, path))
        if args.parallelism is not None:
            cfg = replace(cfg, parallelism=args.parallelism)
        return cfg

    if args.scenario is None:
        return run(override(base, args.output if args.output else base.output.path))

    status = 0
    for suffix, cfg in scenario_configs(args.scenario, base):
        fmt = args.format or cfg.output.format
        target = args.output or (base.output.path if base and base.output.path else f"{args.scenario}.{fmt}")
        status = max(status, run(override(cfg, target if target == "-" else _suffixed(target, suffix))))
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging()
    try:
        if args.command == "verify":
            report = verify(args.level)
            print(report.to_json() if args.format == "json" else report.text())
            return 0 if report.passed else 1
        return _run_command(args, parser)
    except ConfigError as exc:
        print(f"casimir: config error: {exc}", file=sys.stderr)
        return 2
    except CasimirError as exc:
        print(f"casimir: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
