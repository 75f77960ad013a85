"""
Line width, guided wavelength and board size
============================================

Quasi-static microstrip estimate on the 10.7 / 1.27 mm substrate, and
the physical size of a 0.31 x 0.18 guided-wavelength layout.
"""

import numpy as np

from fpdsynth.microstrip import PAPER_SUBSTRATE, analyze, footprint, synthesize_width

w = synthesize_width(50.0, PAPER_SUBSTRATE)
line = analyze(w, PAPER_SUBSTRATE, f=2.6e9)
print("50 ohm width: %.3f mm (%s)" % (w * 1e3, line.regime))
print("eps_eff = %.3f, lambda_g = %.2f mm" % (line.eps_eff, line.lambda_g * 1e3))
print("footprint: %.2f x %.2f mm" % footprint(line.lambda_g))

# %%
# Impedance against width.
for u in np.geomspace(0.1, 10, 7):
    l = analyze(u * PAPER_SUBSTRATE.h, PAPER_SUBSTRATE)
    print(f"w/h = {u:6.3f}: Z0 = {l.z0:7.2f} ohm, eps_eff = {l.eps_eff:.3f}")
