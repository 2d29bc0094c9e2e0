"""Per-user latency/energy model and the closed-form segmentation rules.

``lambda`` is always the *locally executed* fraction of a task; ``1 - lambda``
goes to the MR or, through the full-duplex relay, to the BS.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np


class Destination(str, enum.Enum):
    LOCAL = "local"
    MR = "mr"
    BS = "bs"


@dataclass(frozen=True)
class SegmentationDecision:
    user: int
    destination: Destination
    lam: float
    f_local: float
    latency: float
    user_energy: float
    mr_energy: float = 0.0
    subchannel: int | None = None
    rate: float = 0.0
    f_remote: float = 0.0
    p_mr: float = 0.0
    t_local: float = 0.0
    t_offload: float = 0.0

    @property
    def served(self) -> bool:
        return self.destination is not Destination.LOCAL

    def evolve(self, **changes) -> "SegmentationDecision":
        return replace(self, **changes)


def local_latency(lam, d_m, c_m, f_local):
    if f_local <= 0:
        raise ValueError(f"local frequency must be > 0, got {f_local}")
    return lam * d_m * c_m / f_local


def local_energy(lam, d_m, c_m, f_local, mu):
    if f_local < 0:
        raise ValueError(f"local frequency must be >= 0, got {f_local}")
    return mu * lam * d_m * c_m * f_local ** 2


def offload_latency_energy(lam, user, rate, f_remote, dest, *, xi=0.0, p_mr=0.0):
    """Upload time, remote execution time, user tx energy and MR energy.

    MR energy is execution energy for an MR user and relay transmission
    energy (``p_mr`` times the upload time) for a BS user.
    """
    if rate <= 0 or f_remote <= 0:
        raise ValueError("rate and remote frequency must be > 0")
    if lam >= 1:
        raise ValueError("lambda = 1 means nothing is offloaded; use the local-only path")
    dest = Destination(dest)
    bits = (1.0 - lam) * user.d_m
    t_up = bits / rate
    t_exec = bits * user.c_m / f_remote
    user_energy = user.p_tx * t_up
    if dest is Destination.MR:
        mr_energy = xi * bits * user.c_m * f_remote ** 2
    elif dest is Destination.BS:
        mr_energy = p_mr * t_up
    else:
        raise ValueError("offload destination must be MR or BS")
    return t_up, t_exec, user_energy, mr_energy


def total_latency(t_local, t_offload_path):
    return max(t_local, t_offload_path)


def lambda_bounds(user, rate, f_local, mu):
    """Interval [lo, hi] of local fractions meeting the user's energy budget,
    or None when no fraction does.

    The budget constraint mu*lam*d*c*fL^2 + P*(1-lam)*d/R <= E is affine in
    lam, so it is solved directly instead of through the quotient form.
    When transmitting costs more per bit than computing locally the energy
    falls with lam and the constraint becomes a lower bound.
    """
    if rate <= 0 or f_local <= 0:
        raise ValueError("rate and local frequency must be > 0")
    d, c, e = user.d_m, user.c_m, user.e_budget
    tx = user.p_tx * d / rate               # energy at lam = 0
    slope = mu * d * c * f_local ** 2 - tx  # d(energy)/d(lam)
    if slope > 0:
        if tx > e:
            return None
        return 0.0, min(1.0, (e - tx) / slope)
    if tx + slope > e:                      # energy at lam = 1
        return None
    if tx <= e:
        return 0.0, 1.0
    return min(1.0, (tx - e) / -slope), 1.0


def lambda_upper_bound(user, rate, f_local, mu):
    """Largest energy-feasible local fraction, or None."""
    b = lambda_bounds(user, rate, f_local, mu)
    return None if b is None else b[1]


def lambda_star(f_local, f_remote, c_m, rate):
    """Local fraction at which local and offload-path times coincide."""
    num = f_local * (f_remote + c_m * rate)
    return num / (num + c_m * rate * f_remote)


def lambda_opt(user, rate, f_local, f_remote, mu):
    """Latency-optimal feasible local fraction, or None if none exists."""
    bounds = lambda_bounds(user, rate, f_local, mu)
    if bounds is None:
        return None
    lo, hi = bounds
    # t_m is decreasing up to lambda* and increasing after it
    return min(max(lambda_star(f_local, f_remote, user.c_m, rate), lo), hi)


def optimal_local_frequency(user, lam, mu):
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if lam == 0:
        return user.f_max
    return min(user.f_max, math.sqrt(user.e_budget / (mu * lam * user.d_m * user.c_m)))


def optimal_mr_power(a, b, n0w, beta):
    """MR relay power that equalises the two hop SINRs.

    Positive root of beta*b*P^2 + n0w*b*P - a*n0w = 0, evaluated in the
    cancellation-free form 2*a*n0w / (n0w*b + sqrt(...)). For beta below
    1e-18 the limit a/b is returned. Works elementwise on arrays.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("a and b must be > 0")
    beta = np.asarray(beta, dtype=float)
    if np.any(beta < 0):
        raise ValueError("beta must be >= 0")
    disc = np.sqrt((n0w * b) ** 2 + 4.0 * beta * n0w * a * b)
    p = np.where(beta < 1e-18, a / b, 2.0 * a * n0w / (n0w * b + disc))
    return float(p) if p.ndim == 0 else p


# -- decision builders -------------------------------------------------------

def local_only(user, mu) -> SegmentationDecision:
    f = optimal_local_frequency(user, 1.0, mu)
    t = user.d_m * user.c_m / f
    return SegmentationDecision(
        user=user.id, destination=Destination.LOCAL, lam=1.0, f_local=f,
        latency=t, user_energy=local_energy(1.0, user.d_m, user.c_m, f, mu),
        t_local=t,
    )


def decision_at(user, dest, lam, f_local, rate, f_remote, *, mu, xi, p_mr=0.0,
                subchannel=None) -> SegmentationDecision:
    """Evaluate a fully specified split (no optimisation)."""
    dest = Destination(dest)
    t_loc = local_latency(lam, user.d_m, user.c_m, f_local) if lam > 0 else 0.0
    e_loc = local_energy(lam, user.d_m, user.c_m, f_local, mu)
    if lam >= 1:
        return SegmentationDecision(
            user=user.id, destination=dest, lam=1.0, f_local=f_local,
            latency=t_loc, user_energy=e_loc, subchannel=subchannel, rate=rate,
            f_remote=f_remote, p_mr=p_mr, t_local=t_loc,
        )
    t_up, t_exec, e_tx, e_mr = offload_latency_energy(
        lam, user, rate, f_remote, dest, xi=xi, p_mr=p_mr)
    t_off = t_up + t_exec
    return SegmentationDecision(
        user=user.id, destination=dest, lam=lam, f_local=f_local,
        latency=total_latency(t_loc, t_off), user_energy=e_loc + e_tx,
        mr_energy=e_mr, subchannel=subchannel, rate=rate, f_remote=f_remote,
        p_mr=p_mr, t_local=t_loc, t_offload=t_off,
    )


def segment(user, dest, rate, f_remote, *, mu, xi, p_mr=0.0, subchannel=None) -> SegmentationDecision:
    """Closed-form split for a user already bound to a destination.

    lambda is solved with f_L = f_max, then f_L is capped by the energy
    rule; if the cap binds lambda is solved once more at the capped f_L.
    With no feasible split the user runs fully local.
    """
    f_l = user.f_max
    lam = lambda_opt(user, rate, f_l, f_remote, mu)
    if lam is None:
        return local_only(user, mu)
    f_cap = optimal_local_frequency(user, lam, mu)
    if f_cap < f_l:
        f_l = f_cap
        lam = lambda_opt(user, rate, f_l, f_remote, mu)
        if lam is None:
            return local_only(user, mu)
    return decision_at(user, dest, lam, f_l, rate, f_remote, mu=mu, xi=xi,
                       p_mr=p_mr, subchannel=subchannel)


def energy_feasible_frequency(user, lam, rate, mu):
    """Highest f_L <= f_max keeping total user energy within budget at a
    fixed split, or None when transmission alone exceeds the budget."""
    if lam <= 0:
        return user.f_max
    tx = user.p_tx * (1.0 - lam) * user.d_m / rate if lam < 1 else 0.0
    room = user.e_budget - tx
    if room <= 0:
        return None
    return min(user.f_max, math.sqrt(room / (mu * lam * user.d_m * user.c_m)))
