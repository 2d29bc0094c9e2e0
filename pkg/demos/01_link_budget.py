# %% [markdown]
# # Link budget of the train-ground relay
#
# A user on the train talks to the rooftop mobile relay (MR) over a short
# mmWave hop. Tasks bound for the trackside base station (BS) are forwarded
# by the MR in full duplex, so the MR's own transmit power leaks back into
# its receiver. This script walks through both hops for one user.

# %%
import numpy as np

from trainmec.channel import (
    antenna_gain, noise_power, rate_bs_path, received_power_mr, relay_gain_bs,
    sinr_first_hop, sinr_mr, sinr_second_hop,
)
from trainmec.offload import optimal_mr_power
from trainmec.scenario import SystemConfig, generate_scenario

cfg = SystemConfig()
sc = generate_scenario(cfg, seed=7)
m, s = 0, 0
print(f"antenna gain  {antenna_gain(cfg.hpbw_deg):.2f} (linear)")
print(f"noise on W={cfg.subchannel_bandwidth/1e6:.0f} MHz  "
      f"{noise_power(cfg.noise_density_dbm_per_mhz, cfg.subchannel_bandwidth):.3e} W")
print(f"user {m} is {sc.user_mr_distance(m):.1f} m from the MR, "
      f"the BS is {sc.mr_bs_distance:.0f} m away")

# %% [markdown]
# Direct offloading to the MR only needs the first hop.

# %%
direct = sinr_mr(sc, m, s)
print(f"user -> MR: SINR {10*np.log10(direct.sinr):.1f} dB, rate {direct.rate/1e9:.2f} Gbit/s")

# %% [markdown]
# For the BS path, raising the relay power helps the second hop but adds
# self-interference on the first. The two rates cross at one power, which
# the closed-form rule finds directly.

# %%
n0w = noise_power(cfg.noise_density_dbm_per_mhz, cfg.subchannel_bandwidth)
p_opt = optimal_mr_power(received_power_mr(sc, m, s), relay_gain_bs(sc, s), n0w, cfg.si_cancellation)
for p in (0.05, 0.2, p_opt, 2.0):
    h1, h2 = sinr_first_hop(sc, m, s, p), sinr_second_hop(sc, s, p)
    tag = "  <- equalising power" if p == p_opt else ""
    print(f"P={p:7.3f} W  hop1 {h1.rate/1e9:6.3f}  hop2 {h2.rate/1e9:6.3f}  "
          f"path {rate_bs_path(h1, h2)/1e9:6.3f} Gbit/s{tag}")
