# %% [markdown]
# # Signal fusion inside one dendritic cell
#
# A cell turns PAMP, danger, safe and inflammatory signals into three
# outputs: costimulation (how close it is to migrating), semi-mature and
# mature.  Safe signals push the mature output negative.

# %%
import numpy as np

from dca import SignalVector, transform
from dca.model import transform_array

for label, s in [
    ("nothing", SignalVector()),
    ("PAMP only", SignalVector(pamp=1.0)),
    ("safe only", SignalVector(safe=1.0)),
    ("PAMP + inflammation", SignalVector(pamp=1.0, inflammatory=1.0)),
    ("inflammation only", SignalVector(inflammatory=1.0)),
]:
    out = transform(s)
    print(f"{label:22s} csm={out.csm:+.3f} semi={out.semi:+.3f} mat={out.mat:+.3f}")

# %% [markdown]
# A cell presents its antigen as mature when its accumulated mature output
# beats the semi-mature one.  With no PAMP, that needs danger > 9 x safe, so
# steady traffic (safe near 1) never matures a cell by itself.

# %%
danger = np.linspace(0, 1, 6)
grid = np.column_stack([np.zeros(6), danger, np.full(6, 0.05), np.zeros(6)])
for d, (csm, semi, mat) in zip(danger, transform_array(grid)):
    print(f"danger={d:.1f} safe=0.05 -> {'mature' if mat > semi else 'semi-mature'}")
