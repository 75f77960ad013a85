"""
Theoretical response of the 3-way divider
=========================================

Sweep the 7x7 coupling matrix from 2.4 to 2.8 GHz and summarise the
response: return loss, split loss, bandwidth and reflection zeros.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from fpdsynth import cmatrix
from fpdsynth.prototype import preset
from fpdsynth.synthesis import PAPER_SPEC, build_coupling_plan

out = Path("demo_out")
out.mkdir(exist_ok=True)

plan = build_coupling_plan(PAPER_SPEC, preset("paper-3rd-order-20dB"))
ncm = cmatrix.normalize(plan, PAPER_SPEC)
print(np.round(ncm.m, 4))

res = cmatrix.sweep(ncm, cmatrix.default_grid())
m = cmatrix.metrics(res, PAPER_SPEC)
print("worst in-band RL: %.2f dB" % m.worst_in_band_rl_db)
print("IL at f0:", ["%.4f" % x for x in m.il_at_f0_db], "dB (10 log10 3 = %.4f)" % (10 * np.log10(3)))
print("ripple bandwidth: %.4f" % m.measured_fbw)
print("reflection zeros (GHz):", np.round(np.array(m.reflection_zeros) / 1e9, 5))
print("worst output-output coupling: %.2f dB" % m.worst_isolation_db)

# %%
# The divider is lossless and reciprocal to rounding error.
print("unitarity defect", res.unitarity_defect(), "reciprocity defect", res.reciprocity_defect())

# %%
# Plot |S11| and the three transmissions. The three outputs overlap exactly.
ghz = res.freqs / 1e9
fig, ax = plt.subplots()
for k in range(1, 5):
    ax.plot(ghz, np.maximum(res.db(k, 1), -60), label=f"S{k}1")
ax.set_xlabel("Frequency (GHz)")
ax.set_ylabel("dB")
ax.legend()
fig.savefig(out / "divider_response.png", dpi=120)
