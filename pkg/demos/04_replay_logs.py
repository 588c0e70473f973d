# %% [markdown]
# # Replaying logs from disk
#
# Sessions are exchanged as three comma-separated files:
#
# * signals: `timestamp,dest_unreachable_per_sec,packets_out_per_sec`
# * antigen: `timestamp,antigen_id`
# * truth:   `antigen_id,label`
#
# The same files can come from a real host monitor; here they are written by
# the generator and read back.

# %%
import tempfile
from pathlib import Path

from dca import EngineConfig, compute_mcav, generate_session, parse_session, run
from dca.aggregation import read_presentations, write_presentations
from dca.ingest import read_truth, write_antigen_log, write_signal_log, write_truth

work = Path(tempfile.mkdtemp())
session = generate_session("normal", rng=11)
write_signal_log(session.samples, work / "signals.csv")
write_antigen_log(session.antigen, work / "antigen.csv")
write_truth(session.truth, work / "truth.csv")
print((work / "signals.csv").read_text().splitlines()[:3])

# %%
stream = parse_session(work / "signals.csv", work / "antigen.csv", maxima=session.maxima)
stats, lymph = run(EngineConfig(seed=5), stream)
write_presentations(lymph.records, work / "presentations.csv")
print(stats)

# %% [markdown]
# The presentation log is all the lymph-node stage needs.

# %%
report = compute_mcav(read_presentations(work / "presentations.csv"))
truth = read_truth(work / "truth.csv")
for antigen, mcav in report.mcav.items():
    print(antigen, truth[antigen], f"{mcav:.3f}")
