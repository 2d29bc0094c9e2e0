"""Resource allocation and computation offloading (RACO).

Three phases: admission of served users onto their best free sub-channels,
swap matching among the served users, and the MR/BS association split.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .matching import (
    MatchingState, ResourceKey, apply_swap, cpu_shares, is_swap_blocking,
)
from .model import Evaluator, as_evaluator
from .offload import Destination, SegmentationDecision

EXHAUSTIVE_SPLIT_LIMIT = 64


@dataclass
class Assignment:
    """Complete decision state for one scenario.

    ``decisions`` has one entry per user, indexed by user id; unserved users
    carry their local-only decision.
    """

    matching: MatchingState
    decisions: list[SegmentationDecision]
    f_mr_share: float
    f_bs_share: float
    log: list[str] = field(default_factory=list)

    @property
    def served_mr(self) -> set[int]:
        return {d.user for d in self.decisions if d.destination is Destination.MR}

    @property
    def served_bs(self) -> set[int]:
        return {d.user for d in self.decisions if d.destination is Destination.BS}

    @property
    def served_count(self) -> int:
        return sum(d.served for d in self.decisions)

    @property
    def lam(self) -> dict[int, float]:
        return {d.user: d.lam for d in self.decisions}

    @property
    def f_local(self) -> dict[int, float]:
        return {d.user: d.f_local for d in self.decisions}

    @property
    def p_mr(self) -> dict[int, float]:
        return {d.user: d.p_mr for d in self.decisions if d.destination is Destination.BS}

    @property
    def per_user_latency(self) -> dict[int, float]:
        return {d.user: d.latency for d in self.decisions}

    @property
    def per_user_mr_energy(self) -> dict[int, float]:
        return {d.user: d.mr_energy for d in self.decisions}

    @property
    def total_latency(self) -> float:
        return math.fsum(d.latency for d in self.decisions)

    @property
    def average_latency(self) -> float:
        return self.total_latency / len(self.decisions)

    @property
    def total_mr_energy(self) -> float:
        return math.fsum(d.mr_energy for d in self.decisions)

    def to_dict(self) -> dict:
        users = []
        for d in self.decisions:
            users.append({
                "user": d.user,
                "served": d.served,
                "destination": d.destination.value,
                "subchannel": d.subchannel,
                "lambda": d.lam,
                "f_local": d.f_local,
                "f_remote": d.f_remote,
                "p_mr": d.p_mr,
                "rate": d.rate,
                "latency": d.latency,
                "user_energy": d.user_energy,
                "mr_energy": d.mr_energy,
            })
        return {
            "average_latency": self.average_latency,
            "served_count": self.served_count,
            "total_mr_energy": self.total_mr_energy,
            "f_mr_share": self.f_mr_share,
            "f_bs_share": self.f_bs_share,
            "users": users,
            "log": list(self.log),
        }

    def to_json(self, **kw) -> str:
        kw.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kw)


def all_local(scenario) -> Assignment:
    ev = as_evaluator(scenario)
    cfg = ev.config
    return Assignment(MatchingState(), ev.local_decisions(), cfg.f_mr_total, cfg.f_bs_total)


def build_assignment(ev: Evaluator, state: MatchingState, log=None) -> Assignment:
    """Evaluate every matched user at the uniform CPU split implied by ``state``."""
    shares = cpu_shares(state, ev.config)
    decisions = ev.local_decisions()
    for m, k in state.pairs:
        decisions[m] = ev.decide(m, k.destination, k.subchannel, shares[k.destination])
    return Assignment(state, decisions, shares[Destination.MR], shares[Destination.BS],
                      list(log or []))


def release_unprofitable(ev: Evaluator, state: MatchingState, log=None) -> MatchingState:
    """Drop served users that would finish sooner running fully local.

    Shares are re-split after every release, so the remaining users only
    gain; the worst offender goes first.
    """
    while True:
        shares = cpu_shares(state, ev.config)
        worst, gap = None, 0.0
        for m, k in state.pairs:
            g = ev.decide(m, k.destination, k.subchannel, shares[k.destination]).latency \
                - ev.local(m).latency
            if g > gap:
                worst, gap = m, g
        if worst is None:
            return state
        if log is not None:
            log.append(f"release user {worst}: offloading slower than local by {gap:.6g} s")
        state = state.without([worst])


# -- admission -----------------------------------------------------------------

def _best_subchannel(ev: Evaluator, m, candidates) -> int:
    rates = ev.table.mr_rate[m]
    best = None
    for s in sorted(candidates):
        if best is None or rates[s] > rates[best]:
            best = s
    return best


def admit_users(scenario, order=None):
    """Admission control and initial sub-channel pick.

    Users go in descending task size (ties: lower id) unless ``order`` is
    given. Returns the initial all-MR matching and the served users.
    """
    ev = as_evaluator(scenario)
    cfg = ev.config
    M, S = ev.num_users, ev.num_subchannels
    if order is None:
        order = sorted(range(M), key=lambda m: (-ev.user(m).d_m, m))
    free = set(range(S))
    holder: dict[int, int] = {}          # sub-channel -> user
    num_ac = 0
    f_prov = cfg.f_mr_total / math.ceil(S / 2)

    def gap(m, s):
        u = ev.user(m)
        remote = u.d_m / ev.table.mr_rate[m, s] + u.d_m * u.c_m / f_prov
        return ev.local(m).latency - remote

    for m in order:
        if M <= S:
            s = _best_subchannel(ev, m, free)
            holder[s] = m
            free.discard(s)
        elif num_ac < S:
            s = _best_subchannel(ev, m, free)
            if gap(m, s) > 0:
                holder[s] = m
                free.discard(s)
                num_ac += 1
        else:
            s = _best_subchannel(ev, m, range(S))
            m1 = holder[s]
            if gap(m, s) > gap(m1, s):
                holder[s] = m
    state = MatchingState(tuple((m, ResourceKey(Destination.MR, s)) for s, m in holder.items()))
    return state, sorted(holder.values())


# -- swap matching -------------------------------------------------------------

def swap_phase(state: MatchingState, scenario, max_scans: int = 10_000, stats=None) -> MatchingState:
    """Apply swap-blocking pairs until a full scan finds none."""
    ev = as_evaluator(scenario)
    scans = swaps = 0
    while True:
        scans += 1
        if scans > max_scans:
            raise RuntimeError(f"swap matching did not settle within {max_scans} scans")
        changed = False
        users = state.users
        for m in users:
            for m2 in users:
                if m != m2 and is_swap_blocking(state, ev, m, m2):
                    state = apply_swap(state, m, m2)
                    swaps += 1
                    changed = True
        if not changed:
            break
    if stats is not None:
        stats["scans"] = scans
        stats["swaps"] = swaps
    return state


# -- MR / BS split -------------------------------------------------------------

def _candidate_latencies(ev: Evaluator, state: MatchingState, n_bs: int):
    cfg = ev.config
    users = state.users
    n = len(users)
    t_r = t_b = None
    if n - n_bs > 0:
        f_r = cfg.f_mr_total / (n - n_bs)
        t_r = np.array([ev.decide(m, Destination.MR, state.resource_of(m).subchannel, f_r).latency
                        for m in users])
    if n_bs > 0:
        f_b = cfg.f_bs_total / n_bs
        t_b = np.array([ev.decide(m, Destination.BS, state.resource_of(m).subchannel, f_b).latency
                        for m in users])
    return t_r, t_b


def split_total(ev: Evaluator, state: MatchingState, n_bs: int) -> float:
    """Least total latency of the served users with exactly ``n_bs`` on the BS.

    For fixed shares the best set is the n_bs users with the largest
    MR-minus-BS latency gap.
    """
    t_r, t_b = _candidate_latencies(ev, state, n_bs)
    if t_b is None:
        return math.fsum(t_r)
    if t_r is None:
        return math.fsum(t_b)
    delta = np.sort(t_r - t_b)[::-1]
    return math.fsum(t_r) - math.fsum(delta[:n_bs])


def best_num_bs(ev: Evaluator, state: MatchingState, search: str = "auto") -> int:
    n = len(state)
    if search == "auto":
        search = "exhaustive" if n <= EXHAUSTIVE_SPLIT_LIMIT else "binary"
    if search == "exhaustive":
        totals = [split_total(ev, state, k) for k in range(n + 1)]
        return int(np.argmin(totals))
    if search != "binary":
        raise ValueError(f"unknown search mode {search!r}")
    # assumes unimodality; compares neighbours to pick the descending side
    lo, hi = 0, n
    while lo < hi:
        mid = (lo + hi) // 2
        if split_total(ev, state, mid) <= split_total(ev, state, mid + 1):
            hi = mid
        else:
            lo = mid + 1
    return lo


def split_association(state: MatchingState, scenario, search: str = "auto", log=None) -> Assignment:
    """Decide which served users relay to the BS.

    Picks num_B, then fills the BS set: users gaining latency and costing
    the MR less energy on the BS, trimmed by smallest gain or padded by
    smallest BS latency (non-negative gain) and then largest gain.
    """
    ev = as_evaluator(scenario)
    cfg = ev.config
    log = [] if log is None else log
    users = state.users
    n = len(users)
    if n == 0:
        return all_local(ev)
    baseline_total = split_total(ev, state, 0)
    n_bs = best_num_bs(ev, state, search)
    log.append(f"num_B = {n_bs} of {n} served users")
    if n_bs == 0:
        chosen = set()
    elif n_bs == n:
        chosen = set(users)
    else:
        f_r = cfg.f_mr_total / (n - n_bs)
        f_b = cfg.f_bs_total / n_bs
        dec_r, dec_b, delta = {}, {}, {}
        for m in users:
            s = state.resource_of(m).subchannel
            dec_r[m] = ev.decide(m, Destination.MR, s, f_r)
            dec_b[m] = ev.decide(m, Destination.BS, s, f_b)
            delta[m] = dec_r[m].latency - dec_b[m].latency
        ub = [m for m in users if delta[m] > 0 and dec_r[m].mr_energy > dec_b[m].mr_energy]
        if len(ub) > n_bs:
            ub.sort(key=lambda m: (delta[m], m))
            ub = ub[len(ub) - n_bs:]
        elif len(ub) < n_bs:
            rest = [m for m in users if m not in ub and delta[m] >= 0]
            rest.sort(key=lambda m: (dec_b[m].latency, m))
            ub += rest[:n_bs - len(ub)]
            if len(ub) < n_bs:
                rest = [m for m in users if m not in ub and delta[m] < 0]
                rest.sort(key=lambda m: (-delta[m], m))
                ub += rest[:n_bs - len(ub)]
        chosen = set(ub)
    split = state.with_destinations({m: Destination.BS for m in chosen})
    trial = build_assignment(ev, split)
    if trial.total_latency - math.fsum(ev.local(m).latency for m in range(ev.num_users)
                                       if m not in split) > baseline_total * (1 + 1e-12):
        log.append("split worse than all-MR; keeping every served user on the MR")
        split = state
    split = release_unprofitable(ev, split, log)
    return build_assignment(ev, split, log)


def run_raco(scenario, search: str = "auto") -> Assignment:
    ev = as_evaluator(scenario)
    log: list[str] = []
    state, served = admit_users(ev)
    log.append(f"admitted {len(served)} users: {served}")
    if not served:
        return all_local(ev)
    stats: dict = {}
    state = swap_phase(state, ev, stats=stats)
    log.append(f"swap matching: {stats['swaps']} swaps over {stats['scans']} scans")
    return split_association(state, ev, search=search, log=log)
