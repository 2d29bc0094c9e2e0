"""Scenario-bound evaluation of per-user decisions.

The :class:`Evaluator` caches link rates and closed-form segmentation
results so the matching and association searches can query the same
(user, destination, sub-channel, CPU share) point many times cheaply.
"""
from __future__ import annotations

import numpy as np

from .channel import LinkTable
from .offload import Destination, SegmentationDecision, local_only, segment
from .scenario import Scenario


class Evaluator:
    def __init__(self, scenario: Scenario, p_bs: np.ndarray | None = None):
        self.scenario = scenario
        self.config = scenario.config
        self.table = LinkTable(scenario)
        self.mu = self.config.mu_local
        self.xi = self.config.xi_mr
        if p_bs is None:
            self.p_bs = self.table.p_opt
            self.bs_rate = self.table.bs_rate
        else:
            # one fixed relay power per user, whatever sub-channel it lands on
            p = np.broadcast_to(np.asarray(p_bs, dtype=float)[:, None], self.table.a.shape)
            self.p_bs = np.array(p)
            self.bs_rate = self.table.bs_rate_at(self.p_bs)
        self._local = [local_only(u, self.mu) for u in scenario.users]
        self._cache: dict = {}

    @property
    def num_users(self) -> int:
        return self.scenario.num_users

    @property
    def num_subchannels(self) -> int:
        return self.scenario.num_subchannels

    def user(self, m):
        return self.scenario.users[m]

    def local(self, m) -> SegmentationDecision:
        return self._local[m]

    def rate(self, m, dest, s) -> float:
        if dest is Destination.MR:
            return float(self.table.mr_rate[m, s])
        return float(self.bs_rate[m, s])

    def power(self, m, dest, s) -> float:
        return float(self.p_bs[m, s]) if dest is Destination.BS else 0.0

    def decide(self, m, dest, s, f_remote) -> SegmentationDecision:
        """Closed-form decision for user m offloading to ``dest`` on ``s``."""
        dest = Destination(dest)
        key = (m, dest, s, f_remote)
        hit = self._cache.get(key)
        if hit is None:
            hit = segment(
                self.scenario.users[m], dest, self.rate(m, dest, s), f_remote,
                mu=self.mu, xi=self.xi, p_mr=self.power(m, dest, s), subchannel=s)
            self._cache[key] = hit
        return hit

    def local_decisions(self) -> list[SegmentationDecision]:
        return list(self._local)


def as_evaluator(obj) -> Evaluator:
    return obj if isinstance(obj, Evaluator) else Evaluator(obj)
