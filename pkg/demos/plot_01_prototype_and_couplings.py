"""
From prototype values to coupling coefficients
==============================================

Derive the third-order Chebyshev prototype, then the inter-resonator
couplings, the common-resonator branch coupling and the external Q of a
3-way divider at 2.6 GHz with 3 % fractional bandwidth.
"""

import numpy as np

from fpdsynth.prototype import PrototypeSpec, compute_g_values, ladder_s11, preset, ripple_from_return_loss
from fpdsynth.synthesis import PAPER_SPEC, build_coupling_plan

# A 20 dB return loss corresponds to a very small ripple.
print("ripple for 20 dB RL:", ripple_from_return_loss(20.0), "dB")

# 0.04321 dB ripple reproduces the rounded values used for the 3-way design.
g = compute_g_values(PrototypeSpec(order=3, ripple_db=0.04321))
print("computed g:", np.round(g.g, 5))
print("preset g:  ", preset("paper-3rd-order-20dB").g)

# The lowpass ladder built from these values is equiripple in |w| <= 1.
w = np.linspace(0, 1, 10001)
peak = np.abs(ladder_s11(g, w)).max()
print("ladder in-band peak |S11| = %.2f dB" % (20 * np.log10(peak)))

# %%
# Coupling plan. The branch coupling is M12/sqrt(3) so the common resonator
# shares its energy equally between the three filter branches.
plan = build_coupling_plan(PAPER_SPEC, preset("paper-3rd-order-20dB"))
print("M23 = %.4f, M1 = %.4f, Qe = %.3f" % (plan.m_chain[1], plan.m_trunk, plan.qe_in))
for i, j, m in plan.graph.edges:
    print(f"  r{i} -- r{j}: {m:.5f}")
for port, res, qe in plan.graph.ports:
    print(f"  port {port} on r{res}: Qe = {qe:.3f}")
