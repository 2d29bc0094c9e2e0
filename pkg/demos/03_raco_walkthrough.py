# %% [markdown]
# # One scheduling epoch, step by step
#
# Thirty passengers and ten sub-channels: not everyone can offload. The
# scheduler admits users, trades sub-channels until no pair wants to swap,
# decides who relays to the BS, and finally trims MR energy to its budget.

# %%
from trainmec.constraints import check_assignment
from trainmec.energy_guard import enforce_budget
from trainmec.matching import blocking_pairs
from trainmec.model import Evaluator
from trainmec.raco import admit_users, all_local, split_association, swap_phase
from trainmec.scenario import SystemConfig, generate_scenario

sc = generate_scenario(SystemConfig(num_users=30, num_subchannels=10, e_mr_budget=20.0), seed=3)
ev = Evaluator(sc)

# %% [markdown]
# Admission: big tasks first; when sub-channels run out, a newcomer can
# evict a holder that gains less from offloading.

# %%
state, served = admit_users(ev)
print("admitted:", served)

# %%
stats = {}
state = swap_phase(state, ev, stats=stats)
print(f"swap phase: {stats['swaps']} swaps, {stats['scans']} scans; blocking pairs left:",
      blocking_pairs(state, ev))

# %%
assignment = split_association(state, ev)
print("MR users:", sorted(assignment.served_mr))
print("BS users:", sorted(assignment.served_bs))
print(f"average latency {assignment.average_latency:.3f} s "
      f"(all local {all_local(ev).average_latency:.3f} s), "
      f"MR energy {assignment.total_mr_energy:.2f} J")

# %% [markdown]
# The MR spends more than its 20 J budget, so the guard runs both repairs
# and keeps the better one.

# %%
final = enforce_budget(assignment, ev)
for line in final.log:
    print("  ", line)
print(f"final: {final.average_latency:.3f} s, MR energy {final.total_mr_energy:.2f} J, "
      f"served {final.served_count}")
print("constraint violations:", check_assignment(final, sc, mr_budget=True))
