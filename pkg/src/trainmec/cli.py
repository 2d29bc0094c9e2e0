"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 invalid configuration, 3 runtime
failure (the offending seed is printed).
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import yaml

from .baselines import SCHEMES, run_scheme
from .experiment import (
    ALL_SCHEMES, PRESETS, SWEEPABLE, SweepSpec, TrialFailure, child_seed, preset,
    run_sweep,
)
from .model import Evaluator
from .scenario import ConfigError, SystemConfig, generate_scenario, load_config, validate_config

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="trainmec", description="Train-ground mmWave MEC offloading simulator")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check a configuration file")
    v.add_argument("config", nargs="?")
    v.add_argument("--config", dest="config_opt")

    t = sub.add_parser("trial", help="run one scenario and dump per-user decisions")
    t.add_argument("--config")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--scheme", action="append", choices=sorted(SCHEMES))
    t.add_argument("--out")

    s = sub.add_parser("sweep", help="run a preset or custom Monte-Carlo sweep")
    s.add_argument("--preset", choices=PRESETS)
    s.add_argument("--config")
    s.add_argument("--param", choices=SWEEPABLE)
    s.add_argument("--values", type=float, nargs="+")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--scheme", action="append", choices=sorted(SCHEMES))
    s.add_argument("--trials", type=int)
    s.add_argument("--parallel", type=int, default=1)
    s.add_argument("--out", default=".")

    sub.add_parser("presets", help="list named sweep presets")
    return p


def _config(path) -> SystemConfig:
    cfg = load_config(path) if path else SystemConfig()
    problems = validate_config(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def _writable_dir(path):
    os.makedirs(path, exist_ok=True)
    if not os.access(path, os.W_OK):
        raise UsageError(f"output directory {path!r} is not writable")
    return path


def cmd_validate(args) -> int:
    path = args.config or args.config_opt
    if not path:
        raise UsageError("validate: a configuration file is required")
    _config(path)
    print(f"{path}: ok")
    return EXIT_OK


def cmd_trial(args, out) -> int:
    cfg = _config(args.config)
    schemes = args.scheme or ["jraco"]
    scenario = generate_scenario(cfg, args.seed)
    ev = Evaluator(scenario)
    dump = {"seed": args.seed, "schemes": {}}
    for name in schemes:
        idx = ALL_SCHEMES.index(name)
        try:
            a = run_scheme(name, ev, child_seed(args.seed, 0xB5, idx))
        except Exception as exc:
            raise TrialFailure(args.seed, repr(exc)) from exc
        dump["schemes"][name] = a.to_dict()
    text = json.dumps(dump, indent=2)
    if args.out:
        _writable_dir(args.out)
        with open(os.path.join(args.out, f"trial_seed{args.seed}.json"), "w") as fh:
            fh.write(text + "\n")
    out.write(text + "\n")
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    schemes = tuple(args.scheme) if args.scheme else ALL_SCHEMES
    if args.preset:
        spec = preset(args.preset, schemes=schemes)
        if args.config:
            spec = SweepSpec(spec.parameter, spec.values, spec.trials, _config(args.config),
                             schemes, spec.bs_to_mr_ratio)
        name = args.preset
    else:
        if not (args.param and args.values):
            raise UsageError("sweep: give --preset, or --param with --values")
        spec = SweepSpec(args.param, tuple(sorted(args.values)), 100, _config(args.config), schemes,
                         3.0 if args.param == "f_mr_total" else None)
        name = f"sweep_{args.param}"
    if args.trials is not None:
        if args.trials < 1:
            raise UsageError("--trials must be >= 1")
        spec = SweepSpec(spec.parameter, spec.values, args.trials, spec.base_config,
                         spec.schemes, spec.bs_to_mr_ratio)
    if args.parallel < 1:
        raise UsageError("--parallel must be >= 1")
    outdir = _writable_dir(args.out)
    report = run_sweep(spec, args.seed, parallel=args.parallel)
    raw = os.path.join(outdir, f"{name}_raw.csv")
    summ = os.path.join(outdir, f"{name}_summary.csv")
    with open(raw, "w", newline="") as fh:
        fh.write(report.raw_csv())
    with open(summ, "w", newline="") as fh:
        fh.write(report.summary_csv())
    out.write(report.summary_csv())
    out.write(f"wrote {raw} and {summ}\n")
    return EXIT_OK


def cmd_presets(out) -> int:
    for name in PRESETS:
        spec = preset(name)
        out.write(f"{name}: {spec.parameter} in {list(spec.values)}\n")
    return EXIT_OK


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "trial":
            return cmd_trial(args, out)
        if args.command == "sweep":
            return cmd_sweep(args, out)
        return cmd_presets(out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except ConfigError as exc:
        for v in exc.violations:
            err.write(f"config error: {v}\n")
        return EXIT_CONFIG
    except (OSError, yaml.YAMLError) as exc:
        err.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except TrialFailure as exc:
        err.write(f"runtime failure (seed {exc.seed}): {exc}\n")
        return EXIT_RUNTIME
    except Exception as exc:
        err.write(f"runtime failure: {exc!r}\n")
        return EXIT_RUNTIME


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
