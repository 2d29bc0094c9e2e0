"""System configuration and random problem instances.

A scenario is one frozen population of users around a single mobile relay
(MR) with a base station (BS) at fixed distance, plus the per-link,
per-sub-channel fading power gains drawn for that trial.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields
from typing import Any, Mapping

import numpy as np
import yaml


class ConfigError(ValueError):
    """Raised when a configuration violates its invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    num_users: int = 30
    num_subchannels: int = 10
    total_bandwidth: float = 2e9
    carrier: float = 28e9
    noise_density_dbm_per_mhz: float = -134.0
    user_tx_power_dbm: float = 5.0
    pathloss_exponent: float = 3.0
    si_cancellation: float = 1e-12
    hpbw_deg: float = 30.0
    nakagami_m: float = 3.0
    nakagami_w: float = 1.0 / 3.0
    mu_local: float = 5e-27
    xi_mr: float = 5e-27
    f_mr_total: float = 8e9
    f_bs_total: float = 24e9
    e_mr_budget: float = 5.0
    energy_eps: float = 1e-3
    freq_eps: float = 2e6
    cell_radius_m: float = 120.0
    bs_distance_m: float = 500.0
    task_bits_range: tuple[float, float] = (1e6, 4e6)
    cycles_per_bit_range: tuple[float, float] = (300.0, 500.0)
    f_local_max_range: tuple[float, float] = (0.3e9, 0.5e9)
    user_energy_choices: tuple[float, ...] = (0.5, 1.2, 1.8)
    runp_power_range: tuple[float, float] = (0.1, 0.6)
    jpora_bs_radius_m: float = 200.0

    @property
    def subchannel_bandwidth(self) -> float:
        """W: equal share of the total bandwidth per sub-channel."""
        return self.total_bandwidth / self.num_subchannels

    @property
    def user_tx_power(self) -> float:
        return dbm_to_watt(self.user_tx_power_dbm)

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SystemConfig":
        """Build from a flat or sectioned mapping; unknown keys are an error.

        Nested sections (e.g. ``channel: {pathloss_exponent: 3}``) are
        flattened, so the grouping in a file is purely cosmetic.
        """
        flat = _flatten(data)
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(flat) - set(known))
        if unknown:
            raise ConfigError([f"{k}: unknown configuration key" for k in unknown])
        kwargs = {}
        for name, value in flat.items():
            if isinstance(value, list):
                value = tuple(value)
            kwargs[name] = value
        return cls(**kwargs)


def _flatten(data: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in data.items():
        if isinstance(value, Mapping):
            out.update(_flatten(value, prefix))
        else:
            if key in out:
                raise ConfigError([f"{key}: given more than once"])
            out[key] = value
    return out


def load_config(path) -> SystemConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, Mapping):
        raise ConfigError(["<root>: configuration file must hold a mapping"])
    return SystemConfig.from_dict(data)


def dump_config(config: SystemConfig, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(config.to_dict(), fh, sort_keys=False)


_COUNTS = ("num_users", "num_subchannels")
_POSITIVE = (
    "total_bandwidth", "carrier", "pathloss_exponent", "hpbw_deg",
    "nakagami_m", "nakagami_w", "mu_local", "xi_mr", "f_mr_total",
    "f_bs_total", "energy_eps", "freq_eps", "cell_radius_m",
    "bs_distance_m", "jpora_bs_radius_m",
)
_RANGES = (
    "task_bits_range", "cycles_per_bit_range", "f_local_max_range",
    "runp_power_range",
)


def validate_config(config: SystemConfig) -> list[str]:
    """Return a list of human-readable violations; empty means valid."""
    problems = []

    def finite(name):
        v = getattr(config, name)
        return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)

    for name in _COUNTS:
        v = getattr(config, name)
        if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
            problems.append(f"{name}: must be an integer >= 1 (got {v!r})")
    for name in _POSITIVE:
        if not finite(name) or getattr(config, name) <= 0:
            problems.append(f"{name}: must be a finite value > 0 (got {getattr(config, name)!r})")
    for name in ("noise_density_dbm_per_mhz", "user_tx_power_dbm"):
        if not finite(name):
            problems.append(f"{name}: must be a finite number (got {getattr(config, name)!r})")
    if not finite("si_cancellation") or config.si_cancellation < 0:
        problems.append(f"si_cancellation: must be >= 0 (got {config.si_cancellation!r})")
    if not finite("e_mr_budget") or config.e_mr_budget < 0:
        problems.append(f"e_mr_budget: must be >= 0 (got {config.e_mr_budget!r})")
    if finite("hpbw_deg") and not 0 < config.hpbw_deg < 180:
        problems.append(f"hpbw_deg: must lie in (0, 180) (got {config.hpbw_deg!r})")
    for name in _RANGES:
        r = getattr(config, name)
        try:
            lo, hi = (float(x) for x in r)
        except (TypeError, ValueError):
            problems.append(f"{name}: must be a (low, high) pair (got {r!r})")
            continue
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo <= 0 or lo > hi:
            problems.append(f"{name}: need 0 < low <= high (got {r!r})")
    choices = config.user_energy_choices
    try:
        ok = len(choices) >= 1 and all(float(c) > 0 for c in choices)
    except (TypeError, ValueError):
        ok = False
    if not ok:
        problems.append(f"user_energy_choices: need one or more values > 0 (got {choices!r})")
    return problems


@dataclass(frozen=True)
class UserInstance:
    id: int
    position: tuple[float, float]
    d_m: float          # task size, bits
    c_m: float          # cycles per bit
    f_max: float        # cycles/s
    e_budget: float     # J
    p_tx: float         # W


@dataclass(frozen=True, eq=False)
class Scenario:
    config: SystemConfig
    users: tuple[UserInstance, ...]
    mr_position: tuple[float, float]
    bs_position: tuple[float, float]
    # H_s for user m -> MR on sub-channel s, shape (M, S)
    fading_user: np.ndarray = field(repr=False)
    # H_s for MR -> BS on sub-channel s, shape (S,)
    fading_bs: np.ndarray = field(repr=False)
    seed: int = 0

    @property
    def num_users(self) -> int:
        return len(self.users)

    @property
    def num_subchannels(self) -> int:
        return self.fading_bs.shape[0]

    def user_mr_distance(self, m: int) -> float:
        return math.dist(self.users[m].position, self.mr_position)

    def user_bs_distance(self, m: int) -> float:
        return math.dist(self.users[m].position, self.bs_position)

    @property
    def mr_bs_distance(self) -> float:
        return math.dist(self.mr_position, self.bs_position)

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            self.config == other.config
            and self.users == other.users
            and self.mr_position == other.mr_position
            and self.bs_position == other.bs_position
            and self.seed == other.seed
            and np.array_equal(self.fading_user, other.fading_user)
            and np.array_equal(self.fading_bs, other.fading_bs)
        )

    __hash__ = None


def draw_fading(rng: np.random.Generator, m_s: float, w_s: float, size) -> np.ndarray:
    """Nakagami-m power gains: Gamma(shape=m, scale=w/m), mean w."""
    return rng.gamma(shape=m_s, scale=w_s / m_s, size=size)


def generate_scenario(config: SystemConfig, seed: int) -> Scenario:
    problems = validate_config(config)
    if problems:
        raise ConfigError(problems)
    rng = np.random.default_rng(seed)
    M, S = config.num_users, config.num_subchannels

    # uniform in the disc: sqrt on the radius
    r = config.cell_radius_m * np.sqrt(rng.uniform(0.0, 1.0, M))
    phi = rng.uniform(0.0, 2.0 * np.pi, M)
    xs, ys = r * np.cos(phi), r * np.sin(phi)

    d = rng.uniform(*config.task_bits_range, M)
    c = rng.uniform(*config.cycles_per_bit_range, M)
    fmax = rng.uniform(*config.f_local_max_range, M)
    energy = rng.choice(np.asarray(config.user_energy_choices, dtype=float), M)
    p_tx = config.user_tx_power

    fading_user = draw_fading(rng, config.nakagami_m, config.nakagami_w, (M, S))
    fading_bs = draw_fading(rng, config.nakagami_m, config.nakagami_w, S)
    fading_user.setflags(write=False)
    fading_bs.setflags(write=False)

    users = tuple(
        UserInstance(
            id=i,
            position=(float(xs[i]), float(ys[i])),
            d_m=float(d[i]),
            c_m=float(c[i]),
            f_max=float(fmax[i]),
            e_budget=float(energy[i]),
            p_tx=p_tx,
        )
        for i in range(M)
    )
    return Scenario(
        config=config,
        users=users,
        mr_position=(0.0, 0.0),
        bs_position=(float(config.bs_distance_m), 0.0),
        fading_user=fading_user,
        fading_bs=fading_bs,
        seed=int(seed),
    )


def make_scenario(config: SystemConfig, users, fading_user, fading_bs, seed: int = 0) -> Scenario:
    """Assemble a hand-built scenario (fixtures, small examples)."""
    fu = np.array(fading_user, dtype=float).reshape(len(users), config.num_subchannels)
    fb = np.array(fading_bs, dtype=float).reshape(config.num_subchannels)
    fu.setflags(write=False)
    fb.setflags(write=False)
    return Scenario(
        config=config,
        users=tuple(users),
        mr_position=(0.0, 0.0),
        bs_position=(float(config.bs_distance_m), 0.0),
        fading_user=fu,
        fading_bs=fb,
        seed=seed,
    )
