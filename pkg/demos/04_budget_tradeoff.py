# %% [markdown]
# # How much MR energy is worth spending?
#
# Same scenarios, growing MR budget. The schemes that only trim greedily
# regain latency as the budget loosens; the relay-frequency branch lets
# JRACO keep more users on the MR at a lower clock.

# %%
import numpy as np

from trainmec.baselines import run_scheme
from trainmec.experiment import child_seed
from trainmec.model import Evaluator
from trainmec.scenario import SystemConfig, generate_scenario

budgets = (1.0, 5.0, 20.0, 100.0, 500.0)
schemes = ("jraco", "usra", "ro")
trials = 10

# %%
print("E^R [J] " + "".join(f"{s:>16}" for s in schemes))
for b in budgets:
    cfg = SystemConfig(num_users=30, num_subchannels=20, e_mr_budget=b)
    row = {s: [] for s in schemes}
    for t in range(trials):
        ev = Evaluator(generate_scenario(cfg, child_seed(1, t)))
        for i, s in enumerate(schemes):
            a = run_scheme(s, ev, child_seed(1, t, i))
            row[s].append((a.average_latency, a.served_count))
    cells = "".join(f"{np.mean([x[0] for x in row[s]]):9.3f} s/{np.mean([x[1] for x in row[s]]):4.1f}u"
                    for s in schemes)
    print(f"{b:7.0f} {cells}")
