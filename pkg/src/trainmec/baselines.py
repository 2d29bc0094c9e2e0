"""Comparison schemes run on the same scenarios as JRACO.

* USRA: random admission order, swap matching kept, fair-coin MR/BS
  association, greedy-only budget repair.
* RUNP: random served users (one per sub-channel), random MR relay power
  in ``runp_power_range``; otherwise as JRACO.
* RO: JRACO association and matching, random local fraction per served
  user, greedy-only budget repair.
* JPORA: BS association by distance, max-marginal-rate sub-channels and
  one common local fraction balancing mean local and offload delay.
"""
from __future__ import annotations


import numpy as np

from .energy_guard import enforce_budget
from .matching import MatchingState, ResourceKey, cpu_shares
from .model import Evaluator, as_evaluator
from .offload import Destination, decision_at, energy_feasible_frequency, lambda_opt
from .raco import (
    Assignment, admit_users, all_local, build_assignment, run_raco,
    split_association, swap_phase,
)

JPORA_MAX_ITER = 1000
JPORA_TOL = 1e-4


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def run_jraco(scenario) -> Assignment:
    ev = as_evaluator(scenario)
    return enforce_budget(run_raco(ev), ev)


def run_usra(scenario, seed) -> Assignment:
    ev = as_evaluator(scenario)
    rng = _rng(seed)
    order = [int(m) for m in rng.permutation(ev.num_users)]
    state, served = admit_users(ev, order=order)
    if not served:
        return all_local(ev)
    state = swap_phase(state, ev)
    coin = rng.integers(0, 2, size=len(state.users))
    dests = {m: (Destination.BS if c else Destination.MR) for m, c in zip(state.users, coin)}
    state = state.with_destinations(dests)
    a = build_assignment(ev, state, [f"USRA order {order}"])
    return enforce_budget(a, ev, branches=("greedy",))


def run_runp(scenario, seed) -> Assignment:
    scenario = getattr(scenario, "scenario", scenario)
    rng = _rng(seed)
    M, S = scenario.num_users, scenario.num_subchannels
    p = rng.uniform(*scenario.config.runp_power_range, M)
    ev = Evaluator(scenario, p_bs=p)
    chosen = [int(m) for m in rng.permutation(M)[:min(M, S)]]
    free = set(range(S))
    pairs = []
    for m in chosen:
        rates = ev.table.mr_rate[m]
        s = max(sorted(free), key=lambda s: rates[s])
        free.discard(s)
        pairs.append((m, ResourceKey(Destination.MR, s)))
    state = swap_phase(MatchingState(tuple(pairs)), ev)
    a = split_association(state, ev)
    return enforce_budget(a, ev)


def run_ro(scenario, seed) -> Assignment:
    """JRACO association with a random local fraction for every served user.

    The local CPU is slowed where needed so the user's own energy budget
    still holds at the drawn fraction.
    """
    ev = as_evaluator(scenario)
    cfg = ev.config
    rng = _rng(seed)
    base = run_raco(ev)
    decisions = list(base.decisions)
    for d in base.decisions:
        if not d.served:
            continue
        user = ev.user(d.user)
        lam = float(rng.uniform(0.0, 1.0))
        f_l = energy_feasible_frequency(user, lam, d.rate, cfg.mu_local)
        if f_l is None or f_l <= 0:
            lam = lambda_opt(user, d.rate, user.f_max, d.f_remote, cfg.mu_local)
            f_l = user.f_max
        decisions[d.user] = decision_at(
            user, d.destination, lam, f_l, d.rate, d.f_remote,
            mu=cfg.mu_local, xi=cfg.xi_mr, p_mr=d.p_mr, subchannel=d.subchannel)
    a = Assignment(base.matching, decisions, base.f_mr_share, base.f_bs_share,
                   base.log + ["RO: random local fractions"])
    return enforce_budget(a, ev, branches=("greedy",))


def _common_fraction_decisions(ev: Evaluator, state: MatchingState, lam: float):
    cfg = ev.config
    shares = cpu_shares(state, cfg)
    out = {}
    for m, k in state.pairs:
        user = ev.user(m)
        rate = ev.rate(m, k.destination, k.subchannel)
        f_l = energy_feasible_frequency(user, lam, rate, cfg.mu_local)
        if f_l is None:
            out[m] = ev.local(m)
            continue
        out[m] = decision_at(user, k.destination, lam, f_l, rate, shares[k.destination],
                             mu=cfg.mu_local, xi=cfg.xi_mr,
                             p_mr=ev.power(m, k.destination, k.subchannel), subchannel=k.subchannel)
    return out


def run_jpora(scenario) -> Assignment:
    ev = as_evaluator(scenario)
    cfg = ev.config
    M, S = ev.num_users, ev.num_subchannels
    dest = [Destination.BS if ev.scenario.user_bs_distance(m) <= cfg.jpora_bs_radius_m
            else Destination.MR for m in range(M)]
    rates = np.where(np.array([d is Destination.BS for d in dest])[:, None],
                     ev.bs_rate, ev.table.mr_rate)
    # greedy max marginal rate: best remaining (user, sub-channel) pair first
    free_u, free_s = set(range(M)), set(range(S))
    pairs = []
    while free_u and free_s:
        best = max(((rates[m, s], -m, -s) for m in free_u for s in free_s))
        m, s = -best[1], -best[2]
        pairs.append((m, ResourceKey(dest[m], s)))
        free_u.discard(m)
        free_s.discard(s)
    state = MatchingState(tuple(pairs))

    def gap(lam):
        ds = _common_fraction_decisions(ev, state, lam).values()
        return (sum(d.t_local for d in ds) - sum(d.t_offload for d in ds)) / len(state)

    lo, hi, lam, it = 0.0, 1.0, 0.5, 0
    for it in range(1, JPORA_MAX_ITER + 1):
        lam = 0.5 * (lo + hi)
        g = gap(lam)
        if abs(g) <= JPORA_TOL:
            break
        if g > 0:
            hi = lam
        else:
            lo = lam
    decisions = ev.local_decisions()
    for m, d in _common_fraction_decisions(ev, state, lam).items():
        decisions[m] = d
    shares = cpu_shares(state, cfg)
    a = Assignment(state, decisions, shares[Destination.MR], shares[Destination.BS],
                   [f"JPORA common lambda {lam:.6g} after {it} iterations"])
    return enforce_budget(a, ev, branches=("greedy",))


SCHEMES = {
    "jraco": lambda sc, seed: run_jraco(sc),
    "usra": run_usra,
    "runp": run_runp,
    "ro": run_ro,
    "jpora": lambda sc, seed: run_jpora(sc),
}


def run_scheme(name: str, scenario, seed=None) -> Assignment:
    try:
        fn = SCHEMES[name]
    except KeyError:
        raise ValueError(f"unknown scheme {name!r}; choose from {sorted(SCHEMES)}") from None
    return fn(scenario, seed)
