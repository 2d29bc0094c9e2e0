import math

import numpy as np
import pytest

from trainmec import baselines
from trainmec.experiment import (
    PRESETS, SweepSpec, TrialFailure, aggregate, child_seed, preset, run_sweep, run_trial,
)
from trainmec.raco import all_local
from trainmec.scenario import ConfigError, SystemConfig


def test_aggregate_constant():
    mean, std, ci = aggregate([1, 1, 1, 1])
    assert (mean, std, ci) == (1, 0, (1, 1))


def test_aggregate_two_values():
    mean, std, (lo, hi) = aggregate([0, 2])
    assert mean == 1 and std == pytest.approx(math.sqrt(2))
    assert lo == pytest.approx(1 - 1.96) and hi == pytest.approx(1 + 1.96)


def test_aggregate_single_value_has_no_spread():
    assert aggregate([3.5]) == (3.5, None, None)
    with pytest.raises(ValueError):
        aggregate([])


def test_ci_coverage_self_test():
    rng = np.random.default_rng(0)
    hits = 0
    for _ in range(1000):
        _, _, (lo, hi) = aggregate(rng.standard_normal(100))
        hits += lo <= 0 <= hi
    assert 0.93 <= hits / 1000 <= 0.97


def test_spec_validation():
    for bad in (dict(parameter="hpbw_deg", values=(1,)), dict(parameter="num_users", values=()),
                dict(parameter="num_users", values=(5, 3)),
                dict(parameter="num_users", values=(3,), trials=0),
                dict(parameter="num_users", values=(3,), schemes=("nope",))):
        with pytest.raises(ConfigError):
            SweepSpec(**bad)


def test_config_for_maps_parameters():
    spec = preset("fig4")
    cfg = spec.config_for(6e9)
    assert cfg.f_mr_total == 6e9 and cfg.f_bs_total == 18e9
    assert preset("fig3").config_for(2e6).task_bits_range == (1e6, 2e6)
    assert preset("fig1").config_for(15).num_subchannels == 15


def test_presets_exist():
    for name in PRESETS + ("fig5_deficit",):
        assert preset(name, trials=3).trials == 3
    assert preset("fig2").base_config.f_mr_total == 12e9
    s = preset("fig5_surplus").base_config
    assert (s.num_users, s.num_subchannels) == (20, 25)
    with pytest.raises(ValueError):
        preset("fig9")


def small_spec(**kw):
    base = dict(parameter="num_subchannels", values=(3, 6), trials=3,
                base_config=SystemConfig(num_users=6), schemes=("jraco", "ro"))
    base.update(kw)
    return SweepSpec(**base)


def test_single_trial_marks_spread_unavailable():
    rep = run_sweep(small_spec(trials=1), 5)
    s = rep.summary("jraco", 3)
    assert s.n == 1 and s.std is None and s.ci_lo is None
    assert ",NA,NA,NA," in rep.summary_csv()


def test_report_shape_and_invariants():
    rep = run_sweep(small_spec(), 5)
    assert len(rep.records) == 2 * 3 * 2
    for s in rep.summaries:
        assert s.ci_lo <= s.mean <= s.ci_hi
        assert s.mean_served <= 6
    header = rep.raw_csv().splitlines()[0]
    assert header == "scheme,sweep_value,trial,avg_latency_s,served_count,seed"
    assert rep.summary_csv().splitlines()[0].startswith("scheme,sweep_value,n,mean,std,ci_lo,ci_hi")


def test_schemes_share_the_scenario():
    # identical seeds per (value, trial) across schemes
    rep = run_sweep(small_spec(), 5)
    by = {}
    for r in rep.records:
        by.setdefault((r.sweep_value, r.trial), set()).add(r.seed)
    assert all(len(v) == 1 for v in by.values())
    assert rep.records[0].seed == child_seed(5, 0, 0)


def test_reproducible_and_parallel_invariant():
    a = run_sweep(small_spec(), 11)
    b = run_sweep(small_spec(), 11)
    c = run_sweep(small_spec(), 11, parallel=2)
    assert a.raw_csv() == b.raw_csv() == c.raw_csv()
    assert a.summary_csv() == c.summary_csv()
    assert run_sweep(small_spec(), 12).raw_csv() != a.raw_csv()


def test_constant_scheme_has_zero_width(monkeypatch):
    monkeypatch.setitem(baselines.SCHEMES, "stub", lambda sc, seed: all_local(sc))
    # degenerate task ranges make every all-local latency exactly 2 s
    spec = SweepSpec("num_users", (4,), 5, SystemConfig(num_users=4, task_bits_range=(2e6, 2e6),
                     cycles_per_bit_range=(400, 400), f_local_max_range=(0.4e9, 0.4e9),
                     user_energy_choices=(1.8,)), ("stub",))
    s = run_sweep(spec, 1).summary("stub", 4)
    assert s.std == 0 and s.ci_lo == s.ci_hi == s.mean == pytest.approx(2.0)


def test_trial_failure_reports_seed(monkeypatch):
    def boom(sc, seed):
        raise RuntimeError("kaboom")
    monkeypatch.setitem(baselines.SCHEMES, "jraco", boom)
    with pytest.raises(TrialFailure) as err:
        run_sweep(small_spec(), 3)
    assert err.value.seed == child_seed(3, 0, 0)
    assert "kaboom" in str(err.value)


def test_run_trial_returns_each_scheme():
    out = run_trial(SystemConfig(num_users=5, num_subchannels=3), 4, ("jraco", "usra"))
    assert [o[0] for o in out] == ["jraco", "usra"]
