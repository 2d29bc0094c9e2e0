"""Link budgets for the direct MR path and the two full-duplex hops to the BS."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .offload import optimal_mr_power
from .scenario import Scenario


class ConsistencyError(RuntimeError):
    """Internal bookkeeping mismatch (missing fading entry, hop mismatch)."""


@dataclass(frozen=True)
class LinkBudget:
    sinr: float
    rate: float
    subchannel: int
    residual_si_power: float = 0.0


def path_loss(distance: float, alpha: float) -> float:
    if distance <= 0:
        raise ValueError(f"distance must be > 0, got {distance}")
    return distance ** (-alpha)


def antenna_gain(hpbw_deg: float) -> float:
    """Main-lobe boresight gain of the 802.15.3c reference antenna, linear."""
    if not 0 < hpbw_deg < 180:
        raise ValueError(f"half-power beamwidth must be in (0, 180) degrees, got {hpbw_deg}")
    return (1.6162 / math.sin(math.radians(hpbw_deg) / 2.0)) ** 2


def noise_power(n0_dbm_per_mhz: float, w_hz: float) -> float:
    if w_hz <= 0:
        raise ValueError(f"bandwidth must be > 0, got {w_hz}")
    return 10.0 ** ((n0_dbm_per_mhz - 30.0 - 60.0) / 10.0) * w_hz


def shannon_rate(w_hz, sinr):
    return w_hz * np.log2(1.0 + np.asarray(sinr)) if np.ndim(sinr) else w_hz * math.log2(1.0 + sinr)


def _noise(scenario: Scenario) -> float:
    cfg = scenario.config
    return noise_power(cfg.noise_density_dbm_per_mhz, cfg.subchannel_bandwidth)


def _fading_user(scenario: Scenario, m: int, s: int) -> float:
    try:
        if m < 0 or s < 0:
            raise IndexError
        return float(scenario.fading_user[m, s])
    except IndexError:
        raise ConsistencyError(f"no fading entry for user {m} -> MR on sub-channel {s}") from None


def _fading_bs(scenario: Scenario, s: int) -> float:
    try:
        if s < 0:
            raise IndexError
        return float(scenario.fading_bs[s])
    except IndexError:
        raise ConsistencyError(f"no fading entry for MR -> BS on sub-channel {s}") from None


def received_power_mr(scenario: Scenario, m: int, s: int) -> float:
    """Numerator of the user->MR SINR (the `a` term of the power rule)."""
    cfg = scenario.config
    g = antenna_gain(cfg.hpbw_deg)
    pl = path_loss(scenario.user_mr_distance(m), cfg.pathloss_exponent)
    return _fading_user(scenario, m, s) * g * g * pl * scenario.users[m].p_tx


def relay_gain_bs(scenario: Scenario, s: int) -> float:
    """Per-watt received power gain of the MR->BS hop (the `b` term)."""
    cfg = scenario.config
    g = antenna_gain(cfg.hpbw_deg)
    pl = path_loss(scenario.mr_bs_distance, cfg.pathloss_exponent)
    return _fading_bs(scenario, s) * g * g * pl


def sinr_mr(scenario: Scenario, m: int, s: int) -> LinkBudget:
    w = scenario.config.subchannel_bandwidth
    gamma = received_power_mr(scenario, m, s) / _noise(scenario)
    return LinkBudget(gamma, shannon_rate(w, gamma), s)


def sinr_first_hop(scenario: Scenario, m: int, s: int, p_mr: float) -> LinkBudget:
    if p_mr < 0:
        raise ValueError(f"MR transmit power must be >= 0, got {p_mr}")
    w = scenario.config.subchannel_bandwidth
    si = scenario.config.si_cancellation * p_mr
    gamma = received_power_mr(scenario, m, s) / (_noise(scenario) + si)
    return LinkBudget(gamma, shannon_rate(w, gamma), s, si)


def sinr_second_hop(scenario: Scenario, s: int, p_mr: float) -> LinkBudget:
    if p_mr < 0:
        raise ValueError(f"MR transmit power must be >= 0, got {p_mr}")
    w = scenario.config.subchannel_bandwidth
    gamma = relay_gain_bs(scenario, s) * p_mr / _noise(scenario)
    return LinkBudget(gamma, shannon_rate(w, gamma), s)


def rate_bs_path(first: LinkBudget, second: LinkBudget) -> float:
    if first.subchannel != second.subchannel:
        raise ConsistencyError(
            f"hop sub-channels differ: {first.subchannel} vs {second.subchannel}")
    return min(first.rate, second.rate)


class LinkTable:
    """Rates for every (user, sub-channel), precomputed for one scenario.

    ``mr_rate[m, s]`` is the direct user->MR rate. ``bs_rate[m, s]`` and
    ``p_opt[m, s]`` are the FD relay rate and MR power under the
    rate-equalising power rule.
    """

    def __init__(self, scenario: Scenario):
        cfg = scenario.config
        self.scenario = scenario
        self.w = cfg.subchannel_bandwidth
        self.n0w = _noise(scenario)
        self.beta = cfg.si_cancellation
        g = antenna_gain(cfg.hpbw_deg)
        dist = np.array([scenario.user_mr_distance(m) for m in range(scenario.num_users)])
        p_tx = np.array([u.p_tx for u in scenario.users])
        pl = dist ** (-cfg.pathloss_exponent)
        self.a = scenario.fading_user * (g * g * pl * p_tx)[:, None]
        self.b = np.asarray(scenario.fading_bs) * g * g * path_loss(
            scenario.mr_bs_distance, cfg.pathloss_exponent)
        self.mr_rate = self.w * np.log2(1.0 + self.a / self.n0w)
        self.p_opt = optimal_mr_power(self.a, np.broadcast_to(self.b, self.a.shape), self.n0w, self.beta)
        self.bs_rate = self.bs_rate_at(self.p_opt)

    def first_hop_rate(self, p):
        return self.w * np.log2(1.0 + self.a / (self.n0w + self.beta * p))

    def second_hop_rate(self, p):
        return self.w * np.log2(1.0 + self.b * p / self.n0w)

    def bs_rate_at(self, p):
        """FD relay rate for an arbitrary MR power array (same shape as a)."""
        return np.minimum(self.first_hop_rate(p), self.second_hop_rate(p))

    def bs_rate_single(self, m: int, s: int, p: float) -> float:
        r1 = self.w * math.log2(1.0 + self.a[m, s] / (self.n0w + self.beta * p))
        r2 = self.w * math.log2(1.0 + self.b[s] * p / self.n0w)
        return min(r1, r2)
