"""One-to-one user/resource matching with swap-based exchange stability.

A resource is a (destination, sub-channel) pair. The preference of a user
is its own latency; the preference of a resource is the latency of the
user it serves. A swap between two matched users happens only when all
four parties strictly gain.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from .model import as_evaluator
from .offload import Destination


class ResourceKey(NamedTuple):
    destination: Destination
    subchannel: int


class MatchingError(ValueError):
    pass


@dataclass(frozen=True)
class MatchingState:
    """Immutable partial bijection user <-> resource."""

    pairs: tuple[tuple[int, ResourceKey], ...] = ()

    def __post_init__(self):
        pairs = tuple(sorted((int(m), ResourceKey(Destination(k[0]), int(k[1])))
                             for m, k in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        users = [m for m, _ in pairs]
        subs = [k.subchannel for _, k in pairs]
        if len(set(users)) != len(users):
            raise MatchingError("a user holds more than one resource")
        if len(set(subs)) != len(subs):
            raise MatchingError("a sub-channel is held by more than one user")
        for _, k in pairs:
            if k.destination is Destination.LOCAL:
                raise MatchingError("resources are MR or BS sub-channels")
        object.__setattr__(self, "_by_user", dict(pairs))
        object.__setattr__(self, "_by_resource", {k: m for m, k in pairs})

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, tuple]) -> "MatchingState":
        return cls(tuple(mapping.items()))

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, m):
        return m in self._by_user

    def resource_of(self, m) -> ResourceKey:
        try:
            return self._by_user[m]
        except KeyError:
            raise MatchingError(f"user {m} is not matched") from None

    def user_of(self, k) -> int | None:
        return self._by_resource.get(ResourceKey(Destination(k[0]), int(k[1])))

    @property
    def users(self) -> list[int]:
        return [m for m, _ in self.pairs]

    def members(self, dest: Destination) -> list[int]:
        return [m for m, k in self.pairs if k.destination is dest]

    @property
    def used_subchannels(self) -> set[int]:
        return {k.subchannel for _, k in self.pairs}

    def with_pair(self, m, k) -> "MatchingState":
        d = dict(self._by_user)
        d[m] = ResourceKey(Destination(k[0]), int(k[1]))
        return MatchingState(tuple(d.items()))

    def without(self, users: Iterable[int]) -> "MatchingState":
        drop = set(users)
        return MatchingState(tuple((m, k) for m, k in self.pairs if m not in drop))

    def with_destinations(self, dests: Mapping[int, Destination]) -> "MatchingState":
        """Same sub-channels, destinations replaced for the given users."""
        return MatchingState(tuple(
            (m, ResourceKey(Destination(dests.get(m, k.destination)), k.subchannel))
            for m, k in self.pairs))


def cpu_shares(state: MatchingState, config) -> dict[Destination, float]:
    n_r = len(state.members(Destination.MR))
    n_b = len(state.members(Destination.BS))
    return {
        Destination.MR: config.f_mr_total / n_r if n_r else config.f_mr_total,
        Destination.BS: config.f_bs_total / n_b if n_b else config.f_bs_total,
    }


def latency_under(state: MatchingState, scenario, m, shares=None) -> float:
    """Latency of matched user m under ``state`` with uniform CPU splits."""
    ev = as_evaluator(scenario)
    k = state.resource_of(m)
    if shares is None:
        shares = cpu_shares(state, ev.config)
    return ev.decide(m, k.destination, k.subchannel, shares[k.destination]).latency


def swapped_latencies(state, scenario, m, m2):
    """((t_m, t_m2) now, (t_m, t_m2) after swapping their resources)."""
    ev = as_evaluator(scenario)
    k, k2 = state.resource_of(m), state.resource_of(m2)
    shares = cpu_shares(state, ev.config)
    before = (latency_under(state, ev, m, shares), latency_under(state, ev, m2, shares))
    # a swap keeps |U^R| and |U^B|, so the shares are unchanged
    after = (ev.decide(m, k2.destination, k2.subchannel, shares[k2.destination]).latency,
             ev.decide(m2, k.destination, k.subchannel, shares[k.destination]).latency)
    return before, after


def is_swap_blocking(state: MatchingState, scenario, m, m2) -> bool:
    if m == m2:
        raise MatchingError("a swap needs two distinct users")
    (t_m, t_m2), (s_m, s_m2) = swapped_latencies(state, scenario, m, m2)
    return (
        s_m < t_m2        # resource k' prefers m (swapped) over m' (now)
        and s_m2 < t_m    # resource k prefers m' (swapped) over m (now)
        and s_m2 < t_m2   # user m' prefers k
        and s_m < t_m     # user m prefers k'
    )


def apply_swap(state: MatchingState, m, m2) -> MatchingState:
    k, k2 = state.resource_of(m), state.resource_of(m2)
    d = dict(state._by_user)
    d[m], d[m2] = k2, k
    return MatchingState(tuple(d.items()))


def blocking_pairs(state: MatchingState, scenario) -> list[tuple[int, int]]:
    """Exhaustive scan over ordered pairs; empty means exchange-stable."""
    ev = as_evaluator(scenario)
    users = state.users
    return [(m, m2) for m in users for m2 in users
            if m != m2 and is_swap_blocking(state, ev, m, m2)]


def is_stable(state: MatchingState, scenario) -> bool:
    return not blocking_pairs(state, scenario)
