"""MR energy budget enforcement.

Two repair strategies run on an over-budget assignment and the one with
lower average latency wins:

* greedy knapsack (T1): keep users in ascending latency-per-joule order
  until the next one does not fit, squeeze that one in partially, run
  the rest locally;
* frequency reduction (T2): from the greedy set, promote rejected MR users
  one at a time and lower every MR user's CPU share in steps of
  ``freq_eps`` until the budget holds again.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .matching import MatchingState, ResourceKey
from .model import Evaluator, as_evaluator
from .offload import (
    Destination, SegmentationDecision, decision_at, energy_feasible_frequency,
    lambda_opt,
)
from .raco import Assignment

MAX_PARTIAL_ITER = 10_000


@dataclass(frozen=True)
class KnapsackItem:
    user: int
    weight: float       # J of MR energy
    value_rate: float   # s/J; lower is served first


def knapsack_items(assignment: Assignment) -> list[KnapsackItem]:
    items = [KnapsackItem(d.user, d.mr_energy, d.latency / d.mr_energy)
             for d in assignment.decisions if d.served and d.mr_energy > 0]
    items.sort(key=lambda it: (it.value_rate, it.user))
    return items


def greedy_fill(items, budget: float):
    """Take items in order until the first one that does not fit.

    Returns (accepted, rejected, remaining budget); everything from the
    first misfit onward is rejected, in order.
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    used = 0.0
    for i, it in enumerate(items):
        if used + it.weight > budget:
            return list(items[:i]), list(items[i:]), budget - used
        used += it.weight
    return list(items), [], budget - used


def partial_fit(decision: SegmentationDecision, remaining: float, scenario, log=None):
    """Shrink a user's MR energy to at most ``remaining`` (within eps).

    MR users: iterate f_R = sqrt(rem / (xi (1-lam) d c)) with lam re-solved
    at each new f_R. BS users: raise lam so that relay energy equals rem.
    Returns the adjusted decision, or None when the user cannot be fitted.
    """
    ev = as_evaluator(scenario)
    cfg = ev.config
    eps = cfg.energy_eps
    if remaining <= 0:
        return None
    if 0 <= remaining - decision.mr_energy <= eps:
        return decision
    m, s = decision.user, decision.subchannel
    user = ev.user(m)
    if decision.destination is Destination.MR:
        d = decision
        for _ in range(MAX_PARTIAL_ITER):
            if d.lam >= 1:
                break
            f = math.sqrt(remaining / (cfg.xi_mr * (1 - d.lam) * user.d_m * user.c_m))
            d = ev.decide(m, Destination.MR, s, f)
            if 0 <= remaining - d.mr_energy <= eps:
                if log is not None:
                    log.append(f"partial fit: MR user {m} at f_R={f:.6g}, lambda={d.lam:.6g}")
                return d
        if log is not None:
            log.append(f"partial fit: MR user {m} did not converge; rejected")
        return None
    if decision.destination is Destination.BS:
        rate, p = decision.rate, decision.p_mr
        lam = 1.0 - remaining * rate / (p * user.d_m)
        floor = lambda_opt(user, rate, user.f_max, decision.f_remote, cfg.mu_local)
        if floor is not None:
            lam = max(lam, floor)
        if lam >= 1:
            return None
        f_l = energy_feasible_frequency(user, lam, rate, cfg.mu_local)
        if f_l is None:
            return None
        d = decision_at(user, Destination.BS, lam, f_l, rate, decision.f_remote,
                        mu=cfg.mu_local, xi=cfg.xi_mr, p_mr=p, subchannel=s)
        if log is not None:
            log.append(f"partial fit: BS user {m} lambda -> {lam:.6g}")
        return d
    return None


def _assemble(ev: Evaluator, served: dict[int, SegmentationDecision], base: Assignment, log):
    decisions = ev.local_decisions()
    for m, d in served.items():
        # offloading slower than local execution is never kept
        decisions[m] = d if d.latency <= ev.local(m).latency else ev.local(m)
    state = MatchingState(tuple(
        (d.user, ResourceKey(d.destination, d.subchannel)) for d in decisions if d.served))
    return Assignment(state, decisions, base.f_mr_share, base.f_bs_share, list(log))


def _greedy_branch(ev, assignment, accepted, rejected, remaining, log):
    by_user = {d.user: d for d in assignment.decisions}
    served = {it.user: by_user[it.user] for it in accepted}
    if rejected and remaining > 0:
        k = rejected[0].user
        fitted = partial_fit(by_user[k], remaining, ev, log)
        if fitted is not None:
            served[k] = fitted
    log.append(f"greedy: kept {sorted(served)}; local {sorted(it.user for it in rejected if it.user not in served)}")
    return _assemble(ev, served, assignment, log)


def _members_at(ev, members, subch, f):
    return {m: ev.decide(m, Destination.MR, subch[m], f) for m in members}


def _frequency_branch(ev, assignment, accepted, rejected, log):
    cfg = ev.config
    by_user = {d.user: d for d in assignment.decisions}
    mr_rejected = [it.user for it in rejected if by_user[it.user].destination is Destination.MR]
    if not mr_rejected:
        return None
    fixed = {it.user: by_user[it.user] for it in accepted
             if by_user[it.user].destination is Destination.BS}
    fixed_energy = math.fsum(d.mr_energy for d in fixed.values())
    members = [it.user for it in accepted if by_user[it.user].destination is Destination.MR]
    subch = {m: by_user[m].subchannel for m in members + mr_rejected}
    f0 = assignment.f_mr_share
    step = cfg.freq_eps

    def energy(ms, k):
        f = f0 - k * step
        return fixed_energy + math.fsum(d.mr_energy for d in _members_at(ev, ms, subch, f).values())

    best, best_total, k_now = None, math.inf, 0
    for cand in mr_rejected:
        trial = members + [cand]
        # smallest number of eps-decrements meeting the budget; energy is
        # increasing in f_R, so bisection equals the step-by-step loop
        k_max = math.ceil(f0 / step) - 1
        if k_max < 0 or energy(trial, k_max) > cfg.e_mr_budget:
            log.append(f"frequency: promoting user {cand} needs f_R <= 0; stop")
            break
        lo, hi = k_now, k_max
        while lo < hi:
            mid = (lo + hi) // 2
            if energy(trial, mid) <= cfg.e_mr_budget:
                hi = mid
            else:
                lo = mid + 1
        f = f0 - lo * step
        served = dict(fixed)
        served.update(_members_at(ev, trial, subch, f))
        candidate = _assemble(ev, served, assignment, [])
        if candidate.total_latency >= best_total:
            log.append(f"frequency: promoting user {cand} does not lower total latency; stop")
            break
        best, best_total, members, k_now = candidate, candidate.total_latency, trial, lo
        log.append(f"frequency: promoted user {cand}, f_R = {f:.6g}")
    if best is not None:
        best.log = list(log)
    return best


def enforce_budget(assignment: Assignment, scenario, branches=("greedy", "frequency")) -> Assignment:
    """Bring total MR energy within E^R, keeping the lower-latency repair."""
    ev = as_evaluator(scenario)
    cfg = ev.config
    if assignment.total_mr_energy <= cfg.e_mr_budget:
        return assignment
    log = list(assignment.log)
    log.append(f"MR energy {assignment.total_mr_energy:.6g} J exceeds budget {cfg.e_mr_budget:.6g} J")
    items = knapsack_items(assignment)
    accepted, rejected, remaining = greedy_fill(items, cfg.e_mr_budget)
    t1 = _greedy_branch(ev, assignment, accepted, rejected, remaining, list(log))
    if "frequency" not in branches:
        return t1
    t2 = _frequency_branch(ev, assignment, accepted, rejected, list(log))
    if t2 is None or t2.total_latency >= t1.total_latency:
        t1.log.append("greedy branch selected")
        return t1
    t2.log.append("frequency-reduction branch selected")
    return t2
