"""``tailored-rae`` command line.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import platform
import sys
import time
from pathlib import Path

from .. import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .experiments import COLUMNS, SCENARIO_RUNNERS, validate_rows

COMMANDS = {"scan-l": "scan_L", "scan-pi": "scan_pi", "compare": "compare"}
THETA0_DISTRIBUTION = "uniform on [-pi, pi), seeded from stream (seed, 0)"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _versions() -> dict:
    import numpy
    import pydantic
    import scipy

    return {
        "tailored_rae": __version__,
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "pydantic": pydantic.__version__,
    }


def _cell(value) -> str:
    # repr round-trips floats exactly, so files are byte-stable across runs
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(value)
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_csv(path: Path, columns: tuple[str, ...], rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row[c]) for c in columns])


def write_json(path: Path, columns: tuple[str, ...], rows: list[dict]) -> None:
    data = {"columns": list(columns), "rows": [{c: _json_value(r[c]) for c in columns} for r in rows]}
    path.write_text(json.dumps(data, indent=2) + "\n")


def run_scenario(cfg: ExperimentConfig, scenario: str, arm: str, out: Path, fmt: str) -> list[Path]:
    """Run one scenario and write result files plus ``manifest.json`` into ``out``."""
    start = time.perf_counter()
    rows = SCENARIO_RUNNERS[scenario](cfg, arm)
    validate_rows(scenario, rows)
    columns = COLUMNS[scenario]
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "csv":
        written.append(out / f"{scenario}.csv")
        write_csv(written[-1], columns, rows)
    written.append(out / f"{scenario}.json")
    write_json(written[-1], columns, rows)
    manifest = {
        "scenario": scenario,
        "arm": arm,
        "seed": cfg.seed,
        "config": cfg.model_dump(mode="json"),
        "versions": _versions(),
        "wall_time_s": round(time.perf_counter() - start, 3),
    }
    if scenario == "scan_pi":
        manifest["theta0_distribution"] = THETA0_DISTRIBUTION
    written.append(out / "manifest.json")
    written[-1].write_text(json.dumps(manifest, indent=2) + "\n")
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tailored-rae", description="Robust amplitude estimation experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {COMMANDS[name]} scenario")
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--seed", type=int, metavar="U64", help="override the config seed")
        p.add_argument("--out", metavar="DIR", help="output directory (default: config output)")
        p.add_argument("--arm", choices=("bare", "rc", "both"), default="both")
        p.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
    p = sub.add_parser("validate-config", help="check a config file and echo it normalized")
    p.add_argument("--config", required=True, metavar="PATH")
    sub.add_parser("version", help="print package and dependency versions")
    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError(f"seed: {args.seed} is not an unsigned 64-bit integer")
        cfg = cfg.model_copy(update={"seed": args.seed})
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "version":
            for name, v in _versions().items():
                print(f"{name} {v}")
            return 0
        cfg = _load(args)
        if args.command == "validate-config":
            print(json.dumps(cfg.model_dump(mode="json"), indent=2))
            return 0
        scenario = COMMANDS[args.command]
        cfg.check_scenario(scenario)
        out = Path(args.out if args.out is not None else cfg.output)
        for path in run_scenario(cfg, scenario, args.arm, out, args.fmt):
            print(path)
        return 0
    except ConfigError as err:
        print(f"config error:\n{err}", file=sys.stderr)
        return 2
    except Exception as err:  # noqa: BLE001 - reported as a runtime failure
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
