# %% [markdown]
# # Detecting a port scan
#
# Generate a two-minute session with an ICMP ping scan in the middle, run the
# DC population over it with the default parameters (100 cells, 50 antigen
# per cell, 500-slot tissue store, 120 cycles) and score each process.

# %%
from dca import EngineConfig, compute_mcav, generate_session, run
from dca.aggregation import accuracy_sweep, perfect_range
from dca.ingest import derive_stream

session = generate_session("attack", duration=120, rng=7)
print("scan window (s):", session.window)

for t, sv in derive_stream(session.samples, session.maxima)[session.window[0] - 2 : session.window[0] + 3]:
    print(f"t={t:5.1f} pamp={sv.pamp:.2f} danger={sv.danger:.2f} safe={sv.safe:.2f}")

# %%
stats, lymph = run(EngineConfig(seed=1), session.stream())
report = compute_mcav(lymph.records)
print(stats)
for antigen, score in report.scores.items():
    name = session.names[antigen]
    print(f"{name:5s} ({session.truth[antigen]:9s}) presented={score.presentations:4d} MCAV={score.mcav:.3f}")

# %% [markdown]
# Sweep the anomaly threshold from 0 to 1 and find where every process is
# classified correctly.

# %%
rows = accuracy_sweep(report, session.truth)
for t, acc in rows:
    print(f"threshold {t:.1f}: accuracy {acc:.2f}")
print("perfect between", perfect_range(rows))
