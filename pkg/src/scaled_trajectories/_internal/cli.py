from __future__ import annotations

import argparse
import csv
import datetime
import importlib.metadata
import logging
import os
import pathlib
import shutil
import sys
import tempfile
from collections.abc import Sequence

from scaled_trajectories._internal.config import CommonConfig, parse_config
from scaled_trajectories._internal.exceptions import ConfigException, ScaledTrajectoriesException
from scaled_trajectories._internal.experiments import ExperimentResult
from scaled_trajectories._internal.selftest import run_selftest

logger = logging.getLogger(__name__)

DISTRIBUTION_NAME = "scaled-trajectories"
EXPERIMENT_COMMANDS = ("brownian", "diffraction", "tunneling", "early-arrivals")
TIMESTAMP_FORMAT = "%Y%m%dT%H%M%S%fZ"
FLOAT_FORMAT = ".17g"
RESULT_FILE = "result.csv"
SCALARS_FILE = "scalars.csv"
MANIFEST_FILE = "manifest.txt"


def package_version() -> str:
    try:
        return importlib.metadata.version(DISTRIBUTION_NAME)
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scaled-trajectories",
        description="Scaled Bohmian trajectories of Gaussian wave packets in dissipative environments",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {package_version()}")
    parser.add_argument(
        "--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="stderr log level"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command in EXPERIMENT_COMMANDS:
        experiment = sub.add_parser(
            command,
            help=f"run the {command} experiment; any config key may be given as --<key> <value>",
        )
        experiment.add_argument("--config", type=pathlib.Path, default=None, help="key = value config file")
        experiment.add_argument("--out", type=pathlib.Path, default=pathlib.Path("results"), help="output root")
        experiment.add_argument("--seed", default=None, help="master seed, unsigned 64-bit integer")
        experiment.add_argument("--threads", default=None, help="worker threads, positive integer or 'auto'")
    sub.add_parser("selftest", help="run the analytic-oracle suite")
    return parser


def parse_overrides(extra: Sequence[str]) -> dict[str, str]:
    """
    Turn ``--key value`` and ``--key=value`` flags into config overrides.

    :raises ConfigException: for dangling values, flags without a value and repeated flags
    """
    overrides: dict[str, str] = {}
    items = list(extra)
    position = 0
    while position < len(items):
        flag = items[position]
        if not flag.startswith("--") or len(flag) == 2:
            raise ConfigException(f"unexpected argument {flag!r}, expected --<key> <value>")
        key, separator, value = flag[2:].partition("=")
        if not separator:
            if position + 1 >= len(items):
                raise ConfigException(f"--{key}: missing value")
            value = items[position + 1]
            position += 1
        if key in overrides:
            raise ConfigException(f"--{key}: given more than once")
        overrides[key] = value
        position += 1
    return overrides


def write_result_csv(result: ExperimentResult, path: pathlib.Path) -> None:
    names = list(result.columns)
    columns = [result.columns[name] for name in names]
    with path.open("w", encoding="utf-8", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(names)
        for row in range(result.n_rows):
            writer.writerow([format(float(column[row]), FLOAT_FORMAT) for column in columns])


def write_scalars_csv(result: ExperimentResult, path: pathlib.Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(["name", "value"])
        for name, value in result.scalars.items():
            writer.writerow([name, format(float(value), FLOAT_FORMAT)])


def write_manifest(config: CommonConfig, path: pathlib.Path) -> None:
    lines = [
        f"# {DISTRIBUTION_NAME} {package_version()}",
        f"# experiment = {config.kind}",
        *(f"{key} = {value}" for key, value in config.manifest_items()),
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def execute(config: CommonConfig, out: pathlib.Path | str = "results") -> pathlib.Path:
    """
    Run the configured experiment and write its files to ``<out>/<kind>_<UTC timestamp>/``.

    Files are written to a hidden sibling directory that is renamed into place only after every file
    is complete; on failure it is removed and the exception propagates.
    """
    out = pathlib.Path(out)
    out.mkdir(parents=True, exist_ok=True)
    stamp = datetime.datetime.now(datetime.timezone.utc).strftime(TIMESTAMP_FORMAT)
    target = out / f"{config.kind}_{stamp}"
    if target.exists():
        raise ConfigException(f"output directory {target} already exists")
    staging = pathlib.Path(tempfile.mkdtemp(prefix=f".{config.kind}_", dir=out))
    try:
        result = config.run()
        write_result_csv(result, staging / RESULT_FILE)
        write_scalars_csv(result, staging / SCALARS_FILE)
        write_manifest(config, staging / MANIFEST_FILE)
        os.rename(staging, target)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    logger.info(f"{config.kind}: results written to {target}")
    return target


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if args.command == "selftest":
        if extra:
            parser.error(f"selftest takes no options, got {' '.join(extra)}")
        results = run_selftest()
        for result in results:
            print(f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.detail}")
        return 0 if all(result.passed for result in results) else 1
    try:
        overrides = parse_overrides(extra)
        config = parse_config(args.command, args.config, overrides, seed=args.seed, threads=args.threads)
        target = execute(config, args.out)
    except ScaledTrajectoriesException as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(target)
    return 0
