"""Command-line front end.

Exit codes: 0 success, 1 selftest failures, 2 usage error (unknown flag),
3 config file not found, 4 malformed config, 5 every run diverged,
6 theory unavailable for the configuration.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

import numpy as np

from . import harness
from .config import ConfigError, load_config
from .theory import TheoryError

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3
EXIT_BAD_CONFIG = 4
EXIT_DIVERGED = 5
EXIT_THEORY = 6

log = logging.getLogger("pdapa")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pdapa", description="Multi-task partial-diffusion APA simulator and theory engine.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (
        ("simulate", "run the Monte-Carlo experiment"),
        ("theory", "evaluate the mean-square theory"),
        ("compare", "simulate and compare with theory"),
    ):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", required=True, metavar="PATH")
        s.add_argument("--seed", type=int, metavar="U64")
        s.add_argument("--runs", type=int, metavar="N")
        s.add_argument("--jobs", type=int, default=1, metavar="N")
        s.add_argument("--out", default=".", metavar="DIR")
    sub.add_parser("selftest", help="run the built-in invariant checks")
    return p


def _setup_logging():
    level = os.environ.get("PDAPA_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _load(args):
    loaded = load_config(args.config)
    cfg = loaded.experiment
    try:
        if args.seed is not None:
            if args.seed < 0:
                raise ValueError("--seed must be non-negative")
            cfg = replace(cfg, seed=args.seed)
        if args.runs is not None:
            cfg = replace(cfg, R=args.runs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    return cfg, loaded.dump_wstar


def _cmd_simulate(args) -> int:
    cfg, dump = _load(args)
    res = harness.run_experiment(cfg, jobs=args.jobs)
    files = {"curve.csv": harness.curve_csv(res.curve), "summary.json": harness.dumps(res.summary())}
    if dump:
        files["wstar.txt"] = res.w_star
    harness.write_files(args.out, files)
    s = res.summary()
    print(
        f"simulate: {s['runs']} runs x {s['iterations']} iterations, steady-state NMSD "
        f"{s['steady_state_nmsd_db']:.2f} dB, {s['diverged_runs']} diverged -> {args.out}"
    )
    return EXIT_DIVERGED if res.diverged == cfg.R else EXIT_OK


def _cmd_theory(args) -> int:
    cfg, _ = _load(args)
    try:
        th = harness.theory_for(cfg, normalized=False)
    except TheoryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_THEORY
    harness.write_files(args.out, {"theory.json": harness.dumps(th.to_json())})
    steady = f"{th.msd_steady_db:.2f} dB" if th.stable else "unstable"
    print(f"theory: mu_max {th.mu_max:.4g}, rho(F) {th.spectral_radius_F:.6f}, steady-state MSD {steady} -> {args.out}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    cfg, _ = _load(args)
    rep = harness.compare_theory(cfg, jobs=args.jobs)
    files = {"curve.csv": harness.curve_csv(rep.sim.curve), "compare.json": harness.dumps(rep.to_json())}
    if rep.theory is not None and rep.theory.stable:
        th_db = harness.to_db(rep.theory.msd_transient)
        lines = ["iter,sim_nmsd_db,theory_nmsd_db"]
        lines += [f"{n},{a:.10g},{b:.10g}" for n, (a, b) in enumerate(zip(rep.sim.curve.nmsd_db, th_db))]
        files["compare.csv"] = "\n".join(lines) + "\n"
    harness.write_files(args.out, files)
    if rep.status == "ok":
        print(
            f"compare: steady-state difference {rep.steady_diff_db:+.2f} dB, "
            f"max transient difference {rep.max_transient_diff_db:.2f} dB (n >= {rep.from_iter}) -> {args.out}"
        )
    else:
        print(f"compare: {rep.status} -> {args.out}")
    return EXIT_DIVERGED if rep.sim.diverged == cfg.R else EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    passed, failed = run_selftest(print)
    print(f"selftest: {passed} passed, {failed} failed")
    return EXIT_OK if failed == 0 else EXIT_SELFTEST


COMMANDS = {"simulate": _cmd_simulate, "theory": _cmd_theory, "compare": _cmd_compare, "selftest": _cmd_selftest}


def main(argv=None) -> int:
    _setup_logging()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            return COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"config not found: {exc.filename}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except ConfigError as exc:
        print(f"malformed config: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
