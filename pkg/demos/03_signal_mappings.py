# %% [markdown]
# # How the signal mapping changes the outcome
#
# Experiments M1-M5 over attack and normal sessions, three seeded runs each,
# printed as mean MCAV per process.
#
# * M1: hand-picked mapping
# * M2: PAMP and danger swapped
# * M3: PAMP and safe swapped
# * M4: M1 with one antigen per cell
# * M5: PAMP only, one antigen per cell

# %%
from dca.experiment import run_experiment, spec_from_dict

for kind in ("attack", "normal"):
    print(f"\n{kind} session")
    for mapping in ("M1", "M2", "M3", "M4", "M5"):
        report = run_experiment(spec_from_dict({"mapping": mapping, "session": {"kind": kind, "seed": 3}}))
        cells = "  ".join(f"{s.name}={s.mean:.2f}" for s in report.summary.values())
        print(f"  {mapping}: {cells or '(nothing presented)'}")

# %% [markdown]
# Swapping PAMP and safe makes steady, quiet traffic look like an attack:
# every process in the normal session scores 1.  With PAMP alone, everything
# that gets presented scores 1 and the only remaining clue is how much of
# each process's antigen made it through.

# %%
from dca import generate_session, EngineConfig, run
from dca.aggregation import presentation_ratio
from dca.ingest import MAPPINGS

session = generate_session("attack", rng=3)
_, lymph = run(EngineConfig(antigen_capacity=1, seed=0), session.stream(MAPPINGS["M5"]))
for antigen, ratio in presentation_ratio(lymph.records, session.deposited_counts()).items():
    print(f"{session.names[antigen]:5s} presented/deposited = {ratio:.3f}")
