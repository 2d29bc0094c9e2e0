"""Independent feasibility checker for an Assignment.

Everything is recomputed from the scenario with plain arithmetic (no link
table, no cached decisions) so it can serve as an oracle for the
optimisation code.
"""
from __future__ import annotations

import math

from .offload import Destination


def _gain(hpbw_deg):
    return (1.6162 / math.sin(math.radians(hpbw_deg) / 2.0)) ** 2


def recompute_rate(scenario, m, dest, s, p_mr=0.0) -> float:
    cfg = scenario.config
    w = cfg.total_bandwidth / cfg.num_subchannels
    n0w = 10.0 ** ((cfg.noise_density_dbm_per_mhz - 90.0) / 10.0) * w
    g2 = _gain(cfg.hpbw_deg) ** 2
    u = scenario.users[m]
    l_mr = math.dist(u.position, scenario.mr_position) ** (-cfg.pathloss_exponent)
    a = scenario.fading_user[m, s] * g2 * l_mr * u.p_tx
    if dest is Destination.MR:
        return w * math.log2(1.0 + a / n0w)
    l_rb = math.dist(scenario.mr_position, scenario.bs_position) ** (-cfg.pathloss_exponent)
    b = scenario.fading_bs[s] * g2 * l_rb
    r1 = w * math.log2(1.0 + a / (n0w + cfg.si_cancellation * p_mr))
    r2 = w * math.log2(1.0 + b * p_mr / n0w)
    return min(r1, r2)


def check_assignment(assignment, scenario, tol: float = 1e-9, mr_budget: bool = False) -> list[str]:
    """Return violated constraints as readable strings (empty = feasible).

    Covers the local-fraction range, association consistency, one
    sub-channel per user and one user per sub-channel, user energy
    budgets, local CPU limits, MR/BS CPU capacities and (optionally) the
    MR energy budget. Latencies are re-derived and compared too.
    """
    cfg = scenario.config
    out = []
    decisions = assignment.decisions
    if len(decisions) != scenario.num_users:
        return [f"expected {scenario.num_users} user records, got {len(decisions)}"]
    used = {}
    f_r = f_b = 0.0
    mr_energy = 0.0
    for m, d in enumerate(decisions):
        u = scenario.users[m]
        tag = f"user {m}"
        if d.user != m:
            out.append(f"{tag}: record holds user {d.user}")
        if not -tol <= d.lam <= 1 + tol:
            out.append(f"{tag}: lambda {d.lam} outside [0, 1]")
        if d.lam < 1 - tol and d.destination is Destination.LOCAL:
            out.append(f"{tag}: offloads {1 - d.lam:.3g} of its task with no destination")
        if not -tol <= d.f_local <= u.f_max * (1 + tol):
            out.append(f"{tag}: local frequency {d.f_local} outside [0, f_max={u.f_max}]")
        e_loc = cfg.mu_local * d.lam * u.d_m * u.c_m * d.f_local ** 2
        t_loc = d.lam * u.d_m * u.c_m / d.f_local if d.lam > 0 else 0.0
        if d.destination is Destination.LOCAL:
            if d.subchannel is not None:
                out.append(f"{tag}: local user holds sub-channel {d.subchannel}")
            e_user, t = e_loc, t_loc
        else:
            s = d.subchannel
            if s is None or not 0 <= s < cfg.num_subchannels:
                out.append(f"{tag}: served without a valid sub-channel ({s})")
                continue
            if s in used:
                out.append(f"{tag}: sub-channel {s} already used by user {used[s]}")
            used[s] = m
            rate = recompute_rate(scenario, m, d.destination, s, d.p_mr)
            if not math.isclose(rate, d.rate, rel_tol=1e-9):
                out.append(f"{tag}: rate {d.rate} differs from recomputed {rate}")
            t_up = (1 - d.lam) * u.d_m / rate
            t_exec = (1 - d.lam) * u.d_m * u.c_m / d.f_remote if d.lam < 1 else 0.0
            e_user = e_loc + u.p_tx * t_up
            t = max(t_loc, t_up + t_exec)
            if d.destination is Destination.MR:
                f_r += d.f_remote
                e_mr = cfg.xi_mr * (1 - d.lam) * u.d_m * u.c_m * d.f_remote ** 2
            else:
                f_b += d.f_remote
                e_mr = d.p_mr * t_up
            mr_energy += e_mr
            if not math.isclose(e_mr, d.mr_energy, rel_tol=1e-9, abs_tol=1e-15):
                out.append(f"{tag}: MR energy {d.mr_energy} differs from recomputed {e_mr}")
        if e_user > u.e_budget + tol:
            out.append(f"{tag}: energy {e_user} exceeds budget {u.e_budget}")
        if not math.isclose(t, d.latency, rel_tol=1e-9, abs_tol=1e-12):
            out.append(f"{tag}: latency {d.latency} differs from recomputed {t}")
    if len(used) > cfg.num_subchannels:
        out.append(f"{len(used)} sub-channels assigned, only {cfg.num_subchannels} exist")
    if f_r > cfg.f_mr_total * (1 + tol):
        out.append(f"MR CPU allocation {f_r} exceeds capacity {cfg.f_mr_total}")
    if f_b > cfg.f_bs_total * (1 + tol):
        out.append(f"BS CPU allocation {f_b} exceeds capacity {cfg.f_bs_total}")
    if mr_budget and mr_energy > cfg.e_mr_budget + cfg.energy_eps:
        out.append(f"MR energy {mr_energy} exceeds budget {cfg.e_mr_budget} + eps")
    return out
