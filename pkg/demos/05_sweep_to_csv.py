# %% [markdown]
# # A reproducible sweep
#
# Every trial's scenario comes from one master seed, all schemes see the
# same scenario, and the CSV bytes do not depend on how many workers ran.
# The same run is available as `trainmec sweep --preset fig1`.

# %%
from trainmec.experiment import preset, run_sweep

spec = preset("fig1", trials=5)
report = run_sweep(spec, master_seed=42)
print(report.summary_csv())

# %%
print("JRACO mean latency by sub-channel count:")
for s, v in zip(spec.values, report.means("jraco")):
    print(f"  S={s:2d}  {v:.3f} s")
