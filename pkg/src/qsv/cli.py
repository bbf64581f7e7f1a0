"""Command-line front end: ``qsv bounds|strategy|simulate|scaling``.

Angles are degrees on the command line and in config files. Every failure
prints one line starting with ``error:`` to stderr and exits nonzero
(2 invalid input, 3 strategy self-check failure, 4 unwritable output).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import simulator
from .simulator import FixedDelta, FixedEpsilon, TrialConfig
from .states import SOURCE_KINDS, SourceModel, density_from_json, load_density
from .statistics import n_global, n_global_real, n_local, n_local_real
from .strategy import (
    STRATEGY_CHOICES,
    Strategy,
    StrategyError,
    build_strategy,
    strategy_to_dict,
    table_report,
)

EXIT_INVALID = 2
EXIT_SELF_CHECK = 3
EXIT_UNWRITABLE = 4

CONFIG_KEYS = {
    "theta_degrees", "strategy", "source", "mode", "n_max", "trials", "seed", "output_path", "n_range",
}
SOURCE_PARAMETERS = {
    "pure": set(),
    "werner": {"p"},
    "rotated": {"alice", "bob"},
    "custom": {"path", "matrix"},
}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INVALID):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


@dataclass(frozen=True)
class RunConfig:
    theta_degrees: float
    strategy: str
    source: dict
    mode: FixedEpsilon | FixedDelta
    n_max: int | None
    trials: int
    seed: int
    output_path: str | None
    n_range: tuple[int, int] | None
    base_dir: Path


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise CliError(message)


def _number(data: dict, key: str, kind=float):
    value = data[key]
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), f"config key {key!r} must be a number")
    if kind is int:
        _require(float(value).is_integer(), f"config key {key!r} must be an integer")
        return int(value)
    _require(math.isfinite(value), f"config key {key!r} must be finite")
    return float(value)


def parse_config(data, base_dir: Path = Path(".")) -> RunConfig:
    """Validate a decoded JSON run configuration."""
    _require(isinstance(data, dict), "config must be a JSON object")
    unknown = sorted(set(data) - CONFIG_KEYS)
    _require(not unknown, f"unknown config keys: {', '.join(unknown)}")
    for key in ("theta_degrees", "source", "mode"):
        _require(key in data, f"config is missing {key!r}")

    theta = _number(data, "theta_degrees")
    strategy = data.get("strategy", "auto")
    _require(strategy in STRATEGY_CHOICES, f"config key 'strategy' must be one of {STRATEGY_CHOICES}")

    source = data["source"]
    _require(isinstance(source, dict) and set(source) <= {"kind", "parameters"} and "kind" in source,
             "config key 'source' must be an object with 'kind' and optional 'parameters'")
    _require(source["kind"] in SOURCE_KINDS, f"source kind must be one of {SOURCE_KINDS}")
    params = source.get("parameters", {}) or {}
    _require(isinstance(params, dict), "source parameters must be an object")
    extra = sorted(set(params) - SOURCE_PARAMETERS[source["kind"]])
    _require(not extra, f"unknown parameters for {source['kind']} source: {', '.join(extra)}")

    mode = data["mode"]
    _require(isinstance(mode, dict) and set(mode) == {"kind", "value"},
             "config key 'mode' must be an object with 'kind' and 'value'")
    _require(mode["kind"] in ("fixed_epsilon", "fixed_delta"), "mode kind must be fixed_epsilon or fixed_delta")
    value = _number(mode, "value")
    _require(0.0 < value < 1.0, "mode value must lie in (0, 1)")
    parsed_mode = FixedEpsilon(value) if mode["kind"] == "fixed_epsilon" else FixedDelta(value)

    n_max = _number(data, "n_max", int) if "n_max" in data else None
    if n_max is not None:
        _require(n_max >= 1, "config key 'n_max' must be at least 1")
    trials = _number(data, "trials", int) if "trials" in data else 1
    _require(trials >= 1, "config key 'trials' must be at least 1")
    seed = _number(data, "seed", int) if "seed" in data else 0
    output = data.get("output_path")
    _require(output is None or isinstance(output, str), "config key 'output_path' must be a string")

    n_range = None
    if "n_range" in data:
        r = data["n_range"]
        _require(isinstance(r, list) and len(r) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in r),
                 "config key 'n_range' must be a list of two integers")
        _require(1 <= r[0] < r[1], "config key 'n_range' must satisfy 1 <= n_lo < n_hi")
        n_range = (r[0], r[1])

    return RunConfig(theta, strategy, {"kind": source["kind"], "parameters": params}, parsed_mode,
                     n_max, trials, seed, output, n_range, base_dir)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"config {str(path)!r} is not valid JSON: {exc}") from None
    return parse_config(data, path.parent)


def _strategy(theta: float, choice: str) -> Strategy:
    try:
        return build_strategy(theta, choice)
    except StrategyError as exc:
        raise CliError(f"{exc} residuals={json.dumps(exc.residuals)}", EXIT_SELF_CHECK) from None
    except ValueError as exc:
        raise CliError(str(exc)) from None


def make_source(config: RunConfig, strategy: Strategy) -> SourceModel:
    kind, params = config.source["kind"], config.source["parameters"]
    target = strategy.target
    try:
        if kind == "pure":
            return SourceModel.pure(target)
        if kind == "werner":
            _require("p" in params, "werner source needs parameter 'p'")
            return SourceModel.werner(target, _number(params, "p"))
        if kind == "rotated":
            angles = {}
            for arm in ("alice", "bob"):
                a = params.get(arm, [0.0, 0.0, 0.0])
                _require(isinstance(a, list) and len(a) == 3, f"rotated source parameter {arm!r} needs three angles")
                angles[arm] = [math.radians(float(v)) for v in a]
            return SourceModel.rotated(target, angles["alice"], angles["bob"])
        _require(("path" in params) != ("matrix" in params), "custom source needs exactly one of 'path' or 'matrix'")
        if "path" in params:
            rho = load_density(config.base_dir / params["path"])
        else:
            rho = density_from_json(params["matrix"])
        return SourceModel.custom(target, rho)
    except OSError as exc:
        raise CliError(f"cannot read density matrix: {exc.strerror}") from None
    except (TypeError, ValueError) as exc:
        raise CliError(str(exc)) from None


def _write(path: Path, text: str) -> None:
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {str(path)!r}: {exc.strerror}", EXIT_UNWRITABLE) from None


def _output_path(config: RunConfig, override: str | None, default: str) -> Path:
    if override:
        return Path(override)
    if config.output_path:
        return config.base_dir / config.output_path
    return Path(default)


def cmd_bounds(args) -> dict:
    for flag, value in (("--epsilon", args.epsilon), ("--delta", args.delta)):
        _require(0.0 < value < 1.0, f"{flag} must lie in (0, 1), got {value!r}")
    _require(0.0 <= args.theta <= 90.0, f"--theta must lie in [0, 90], got {args.theta!r}")
    strategy = _strategy(args.theta, args.strategy)
    f = strategy.f
    _require(f * args.epsilon < 1.0, "--epsilon times f must be below 1")
    return {
        "theta_degrees": args.theta,
        "strategy": strategy.name,
        "epsilon": args.epsilon,
        "delta": args.delta,
        "f": f,
        "penalty": 1.0 / f,
        "n_global_real": n_global_real(args.epsilon, args.delta),
        "n_global": n_global(args.epsilon, args.delta),
        "n_local_real": n_local_real(args.epsilon, args.delta, f),
        "n_local": n_local(args.epsilon, args.delta, f),
    }


def cmd_strategy(args) -> dict:
    _require(0.0 <= args.theta <= 90.0, f"--theta must lie in [0, 90], got {args.theta!r}")
    strategy = _strategy(args.theta, args.strategy)
    out = strategy_to_dict(strategy)
    if args.check_table:
        try:
            out["table_check"] = table_report(strategy)
        except ValueError as exc:
            raise CliError(f"--check-table: {exc}") from None
    return out


def _trial_configs(config: RunConfig, seed: int):
    _require(config.n_max is not None, "config is missing 'n_max'")
    strategy = _strategy(config.theta_degrees, config.strategy)
    source = make_source(config, strategy)
    return [TrialConfig(strategy, source, config.n_max, config.mode, seed, k) for k in range(config.trials)]


def cmd_simulate(args) -> list[Path]:
    config = load_config(args.config)
    seed = config.seed if args.seed is None else args.seed
    trials = _trial_configs(config, seed)
    target = _output_path(config, args.output, "trial.csv")
    records = [simulator.run_trial(t) for t in trials]
    written = []
    for k, rec in enumerate(records):
        path = target if len(records) == 1 else target.with_name(f"{target.stem}_trial{k}{target.suffix}")
        _write(path, rec.csv_text())
        written.append(path)
    return written


def cmd_scaling(args) -> Path:
    config = load_config(args.config)
    _require(isinstance(config.mode, FixedDelta), "scaling needs mode kind fixed_delta")
    _require(config.n_range is not None, "config is missing 'n_range'")
    seed = config.seed if args.seed is None else args.seed
    strategy = _strategy(config.theta_degrees, config.strategy)
    source = make_source(config, strategy)
    summary = simulator.run_scaling(strategy, source, config.trials, config.n_range, config.mode.delta, seed)
    path = _output_path(config, args.output, "scaling.csv")
    _write(path, summary.csv_text())
    if summary.flagged:
        print(f"note: every trial excluded at {len(summary.flagged)} round counts "
              f"(first n={summary.flagged[0]})", file=sys.stderr)
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qsv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", help="sample counts for given epsilon, delta and target angle")
    b.add_argument("--epsilon", type=float, required=True)
    b.add_argument("--delta", type=float, required=True)
    b.add_argument("--theta", type=float, default=45.0, help="target angle in degrees")
    b.add_argument("--strategy", choices=STRATEGY_CHOICES, default="auto")
    b.add_argument("--json", action="store_true", help="print JSON instead of a table")

    s = sub.add_parser("strategy", aliases=["strategy-info"], help="print a strategy as JSON")
    s.add_argument("--theta", type=float, default=45.0, help="target angle in degrees")
    s.add_argument("--strategy", choices=STRATEGY_CHOICES, default="auto")
    s.add_argument("--check-table", action="store_true", help="add the wave-plate consistency report")

    for name, help_text in (("simulate", "run trials and write per-round CSV"),
                            ("scaling", "average epsilon over trials and write CSV")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="JSON run configuration")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--output", default=None, help="override the config output path")
    return parser


def _print_table(rows: dict) -> None:
    width = max(len(k) for k in rows)
    for key, value in rows.items():
        if isinstance(value, float):
            value = format(value, ".10g")
        print(f"{key:<{width}}  {value}")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "bounds":
            result = cmd_bounds(args)
            if args.json:
                print(json.dumps(result, indent=2))
            else:
                _print_table(result)
        elif args.command in ("strategy", "strategy-info"):
            print(json.dumps(cmd_strategy(args), indent=2))
        elif args.command == "simulate":
            for path in cmd_simulate(args):
                print(f"wrote {path}")
        else:
            print(f"wrote {cmd_scaling(args)}")
    except CliError as exc:
        message = " ".join(str(exc).split())
        print(f"error: {message}", file=sys.stderr)
        return exc.code
    return 0


if __name__ == "__main__":
    sys.exit(main())
