# %% [markdown]
# # Splitting one task between the handset and the edge
#
# A fraction `lam` of the task runs locally and `1 - lam` is uploaded. The
# latency is the slower of the two parallel branches, so the best split
# makes them finish together, unless the handset's energy budget forbids it.

# %%
import numpy as np

from trainmec.offload import (
    Destination, lambda_bounds, lambda_opt, lambda_star, optimal_local_frequency, segment,
)
from trainmec.scenario import UserInstance

mu = 5e-27
user = UserInstance(id=0, position=(40.0, 0.0), d_m=3e6, c_m=420.0, f_max=0.45e9,
                    e_budget=1.2, p_tx=10 ** 0.5 * 1e-3)
rate, f_remote = 2.0e9, 2.0e9

# %% [markdown]
# Scan the split on a grid and compare with the closed form.

# %%
lams = np.linspace(0, 1, 10_001)
t_loc = lams * user.d_m * user.c_m / user.f_max
t_off = (1 - lams) * (user.d_m / rate + user.d_m * user.c_m / f_remote)
energy = mu * lams * user.d_m * user.c_m * user.f_max ** 2 + user.p_tx * (1 - lams) * user.d_m / rate
feasible = energy <= user.e_budget
t = np.maximum(t_loc, t_off)
best = lams[feasible][np.argmin(t[feasible])]
print("feasible interval", lambda_bounds(user, rate, user.f_max, mu))
print(f"lambda*  {lambda_star(user.f_max, f_remote, user.c_m, rate):.5f}")
print(f"closed form {lambda_opt(user, rate, user.f_max, f_remote, mu):.5f}   grid {best:.5f}")

# %% [markdown]
# The budget also caps the local clock. `segment` solves the split at
# f_max, caps the clock, and re-solves once if the cap binds.

# %%
for e in (1.8, 0.5, 0.1):
    u = UserInstance(**{**user.__dict__, "e_budget": e})
    d = segment(u, Destination.MR, rate, f_remote, mu=mu, xi=mu)
    print(f"E={e:3.1f} J  lam={d.lam:.4f}  f_L={d.f_local/1e9:.3f} GHz  "
          f"t={d.latency:.3f} s  energy={d.user_energy:.3f} J  ({d.destination.value})")
print("energy cap on f_L at lam=1:", f"{optimal_local_frequency(user, 1.0, mu)/1e9:.3f} GHz")
