"""Command line: ``iondirac run CONFIG``, ``iondirac sweep DIR``, ``iondirac check``.

The worker count for ``sweep`` comes from IONDIRAC_WORKERS (default 1).
"""
from __future__ import annotations

import argparse
import logging
import os
import subprocess
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .config import load_config
from .errors import ConfigError, ConvergenceError, InvalidTruncation, IonDiracError
from .scenarios import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_PHYSICS, run_scenario

log = logging.getLogger("iondirac")
WORKERS_ENV = "IONDIRAC_WORKERS"


def _prepare(path, args):
    cfg = load_config(path).with_profile(args.tolerance_profile)
    if args.backend is not None:
        cfg = replace(cfg, backend=args.backend)
    return cfg


def run_one(path, args, out_dir=None) -> int:
    try:
        cfg = _prepare(path, args)
        result = run_scenario(cfg, out_dir=out_dir if out_dir is not None else args.out)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (InvalidTruncation, ConvergenceError) as exc:
        log.error("%s: %s", path, exc)
        return EXIT_NUMERICAL
    except IonDiracError as exc:
        log.error("%s: %s", path, exc)
        return EXIT_CONFIG
    for check in result.checks:
        log.info("%s", check.line())
    leak = result.report.get("leakage")
    if leak is not None:
        log.info("max leakage %.2e (tolerance %.1e)", leak["max"], leak["tolerance"])
    if "error" in result.report:
        log.error("%s", result.report["error"])
    for kind, where in result.paths.items():
        log.info("wrote %s %s", kind, where)
    return result.exit_code


def _sweep_job(job):
    path, args, out_dir = job
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    return str(path), run_one(path, args, out_dir)


def sweep(args) -> int:
    root = Path(args.config_dir)
    configs = sorted(p for p in root.iterdir() if p.suffix in (".yaml", ".yml")) if root.is_dir() else []
    if not configs:
        log.error("no .yaml configs in %s", root)
        return EXIT_CONFIG
    out = Path(args.out or "out")
    jobs = [(p, args, out / p.stem) for p in configs]
    workers = max(1, int(os.environ.get(WORKERS_ENV, "1")))
    if workers == 1:
        results = [_sweep_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_job, jobs))
    for path, code in results:
        log.info("%-40s exit %d", path, code)
    # worst outcome wins: numerical > config > physics
    codes = {c for _, c in results}
    for code in (EXIT_NUMERICAL, EXIT_CONFIG, EXIT_PHYSICS):
        if code in codes:
            return code
    return 0


def check(args) -> int:
    here = Path(__file__).resolve()
    for parent in here.parents:
        target = parent / "tests" / "test_acceptance.py"
        if target.is_file():
            return subprocess.call([sys.executable, "-m", "pytest", "-q", "-s", str(target)], cwd=parent)
    log.error("acceptance suite not found; run from a source checkout")
    return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iondirac", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output directory (default: from config, else ./out)")
    common.add_argument("--tolerance-profile", choices=("strict", "default"), default="default")
    common.add_argument("--backend", choices=("dense", "krylov", "auto"), default=None,
                        help="override the config's propagation backend")
    common.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", parents=[common], help="run one scenario config")
    p_run.add_argument("config")
    p_sweep = sub.add_parser("sweep", parents=[common],
                             help=f"run every config in a directory (workers: ${WORKERS_ENV})")
    p_sweep.add_argument("config_dir")
    sub.add_parser("check", parents=[common], help="run the acceptance suite")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    if args.command == "run":
        return run_one(args.config, args)
    if args.command == "sweep":
        return sweep(args)
    return check(args)


if __name__ == "__main__":
    sys.exit(main())
