"""Seeded Monte-Carlo sweeps with paired schemes and normal-approximation CIs."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import SCHEMES, run_scheme
from .model import Evaluator
from .scenario import SystemConfig, generate_scenario, validate_config, ConfigError

SWEEPABLE = ("num_subchannels", "num_users", "task_size_max", "f_mr_total", "e_mr_budget")
ALL_SCHEMES = ("jraco", "usra", "runp", "ro", "jpora")
Z95 = 1.96


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    trials: int = 100
    base_config: SystemConfig = field(default_factory=SystemConfig)
    schemes: tuple[str, ...] = ALL_SCHEMES
    # BS capacity follows the MR capacity by this factor when f_mr_total is swept
    bs_to_mr_ratio: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        problems = []
        if self.parameter not in SWEEPABLE:
            problems.append(f"parameter: must be one of {SWEEPABLE} (got {self.parameter!r})")
        if not self.values:
            problems.append("values: must not be empty")
        elif list(self.values) != sorted(self.values):
            problems.append("values: must be sorted ascending")
        if self.trials < 1:
            problems.append(f"trials: must be >= 1 (got {self.trials})")
        unknown = [s for s in self.schemes if s not in SCHEMES]
        if unknown or not self.schemes:
            problems.append(f"schemes: unknown or empty {unknown}")
        if problems:
            raise ConfigError(problems)

    def config_for(self, value) -> SystemConfig:
        cfg = self.base_config
        if self.parameter == "task_size_max":
            cfg = cfg.replace(task_bits_range=(cfg.task_bits_range[0], float(value)))
        elif self.parameter == "f_mr_total":
            cfg = cfg.replace(f_mr_total=float(value))
            if self.bs_to_mr_ratio is not None:
                cfg = cfg.replace(f_bs_total=float(value) * self.bs_to_mr_ratio)
        elif self.parameter in ("num_subchannels", "num_users"):
            cfg = cfg.replace(**{self.parameter: int(value)})
        else:
            cfg = cfg.replace(**{self.parameter: float(value)})
        problems = validate_config(cfg)
        if problems:
            raise ConfigError(problems)
        return cfg


@dataclass(frozen=True)
class TrialRecord:
    scheme: str
    sweep_value: float
    trial: int
    avg_latency_s: float
    served_count: int
    seed: int


@dataclass(frozen=True)
class Summary:
    scheme: str
    sweep_value: float
    n: int
    mean: float
    std: float | None
    ci_lo: float | None
    ci_hi: float | None
    mean_served: float


@dataclass
class SweepReport:
    spec: SweepSpec
    master_seed: int
    records: list[TrialRecord]
    summaries: list[Summary]

    def summary(self, scheme, value) -> Summary:
        for s in self.summaries:
            if s.scheme == scheme and s.sweep_value == value:
                return s
        raise KeyError((scheme, value))

    def means(self, scheme) -> list[float]:
        return [self.summary(scheme, v).mean for v in self.spec.values]

    def served(self, scheme) -> list[float]:
        return [self.summary(scheme, v).mean_served for v in self.spec.values]

    def raw_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scheme", "sweep_value", "trial", "avg_latency_s", "served_count", "seed"])
        for r in self.records:
            w.writerow([r.scheme, _fmt(r.sweep_value), r.trial, repr(r.avg_latency_s),
                        r.served_count, r.seed])
        return buf.getvalue()

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scheme", "sweep_value", "n", "mean", "std", "ci_lo", "ci_hi", "mean_served"])
        for s in self.summaries:
            w.writerow([s.scheme, _fmt(s.sweep_value), s.n, repr(s.mean), _opt(s.std),
                        _opt(s.ci_lo), _opt(s.ci_hi), repr(s.mean_served)])
        return buf.getvalue()


def _fmt(v):
    return repr(v) if isinstance(v, float) else str(v)


def _opt(v):
    return "NA" if v is None else repr(v)


def aggregate(values):
    """Sample mean, sample std and 95% normal CI; std/CI are None for n < 2."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("no values to aggregate")
    mean = math.fsum(x) / x.size
    if x.size < 2:
        return mean, None, None
    std = float(np.std(x, ddof=1))
    half = Z95 * std / math.sqrt(x.size)
    return mean, std, (mean - half, mean + half)


def child_seed(master_seed: int, *path: int) -> int:
    ss = np.random.SeedSequence([int(master_seed), *map(int, path)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def run_trial(config: SystemConfig, seed: int, schemes) -> list[tuple[str, float, int]]:
    """All schemes on one shared scenario; baseline RNG streams are derived
    from the scenario seed but independent of the scenario draw."""
    scenario = generate_scenario(config, seed)
    ev = Evaluator(scenario)
    out = []
    for name in schemes:
        idx = ALL_SCHEMES.index(name) if name in ALL_SCHEMES else len(ALL_SCHEMES)
        a = run_scheme(name, ev, child_seed(seed, 0xB5, idx))
        out.append((name, a.average_latency, a.served_count))
    return out


class TrialFailure(RuntimeError):
    def __init__(self, seed, cause):
        self.seed = seed
        super().__init__(f"trial with seed {seed} failed: {cause}")


def _trial_job(job):
    config, seed, schemes = job
    try:
        return run_trial(config, seed, schemes), None
    except Exception as exc:
        return None, repr(exc)


def run_sweep(spec: SweepSpec, master_seed: int, parallel: int = 1) -> SweepReport:
    jobs, keys = [], []
    for vi, value in enumerate(spec.values):
        cfg = spec.config_for(value)
        for t in range(spec.trials):
            seed = child_seed(master_seed, vi, t)
            jobs.append((cfg, seed, spec.schemes))
            keys.append((value, t, seed))
    results = _execute(jobs, parallel)
    records = []
    for (value, t, seed), res in zip(keys, results):
        for name, lat, served in res:
            records.append(TrialRecord(name, value, t, lat, served, seed))
    summaries = []
    for name in spec.schemes:
        for value in spec.values:
            rows = [r for r in records if r.scheme == name and r.sweep_value == value]
            mean, std, ci = aggregate([r.avg_latency_s for r in rows])
            summaries.append(Summary(
                name, value, len(rows), mean, std,
                None if ci is None else ci[0], None if ci is None else ci[1],
                math.fsum(r.served_count for r in rows) / len(rows)))
    return SweepReport(spec, master_seed, records, summaries)


def _execute(jobs, parallel):
    # results come back in job order, so output never depends on `parallel`
    if parallel <= 1:
        outcomes = map(_trial_job, jobs)
        return [_unwrap(job, o) for job, o in zip(jobs, outcomes)]
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        chunk = max(1, len(jobs) // (4 * parallel))
        outcomes = pool.map(_trial_job, jobs, chunksize=chunk)
        return [_unwrap(job, o) for job, o in zip(jobs, outcomes)]


def _unwrap(job, outcome):
    result, err = outcome
    if err is not None:
        raise TrialFailure(job[1], err)
    return result


# -- presets -------------------------------------------------------------------

# MR energy budget used by the fig1-fig4 presets; large enough not to bind,
# so those sweeps isolate the channel, user and capacity effects.
SWEEP_MR_BUDGET = 1000.0


def preset(name: str, trials: int = 100, schemes=ALL_SCHEMES) -> SweepSpec:
    base = SystemConfig(e_mr_budget=SWEEP_MR_BUDGET)
    if name == "fig1":
        return SweepSpec("num_subchannels", (10, 15, 20, 25, 30, 35, 40), trials,
                         base.replace(num_users=30), schemes)
    if name == "fig2":
        return SweepSpec("num_users", (15, 20, 25, 30, 35, 40, 45), trials,
                         base.replace(num_subchannels=30, f_mr_total=12e9, f_bs_total=36e9), schemes)
    if name == "fig3":
        return SweepSpec("task_size_max", (1.5e6, 2e6, 2.5e6, 3e6, 3.5e6, 4e6), trials,
                         base.replace(num_users=30, num_subchannels=20), schemes)
    if name == "fig4":
        return SweepSpec("f_mr_total", (4e9, 6e9, 8e9, 10e9, 12e9, 14e9, 16e9), trials,
                         base.replace(num_users=30, num_subchannels=20), schemes,
                         bs_to_mr_ratio=3.0)
    if name in ("fig5", "fig5_deficit"):
        return SweepSpec("e_mr_budget", FIG5_BUDGETS, trials,
                         SystemConfig(num_users=30, num_subchannels=20), schemes)
    if name == "fig5_surplus":
        return SweepSpec("e_mr_budget", FIG5_BUDGETS, trials,
                         SystemConfig(num_users=20, num_subchannels=25), schemes)
    raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}")


FIG5_BUDGETS = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0)
PRESETS = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig5_surplus")
