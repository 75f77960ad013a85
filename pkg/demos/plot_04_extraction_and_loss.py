"""
Extracting couplings, and fitting an unloaded Q
===============================================

Recover the coupling coefficients from the split resonances of a
weakly probed pair, recover Qe from the reflection group delay, and fit
the unloaded Q that accounts for 0.34 dB of extra midband loss.
"""

from fpdsynth import cmatrix
from fpdsynth.mna import build_divider_netlist, coupled_pair_netlist, extract_k, extract_qe, loaded_tank_netlist
from fpdsynth.prototype import preset
from fpdsynth.synthesis import PAPER_SPEC, build_coupling_plan, refine_couplings

g = preset("paper-3rd-order-20dB")
plan = build_coupling_plan(PAPER_SPEC, g)
b = build_divider_netlist(plan, PAPER_SPEC).b
f0 = PAPER_SPEC.f0

print("k (branch) = %.5f  vs M23 %.5f" % (extract_k(coupled_pair_netlist(plan.m_chain[1], f0, b)), plan.m_chain[1]))
print("k (trunk)  = %.5f  vs M1  %.5f" % (extract_k(coupled_pair_netlist(plan.m_trunk, f0, b)), plan.m_trunk))
print("Qe         = %.3f" % extract_qe(loaded_tank_netlist(f0, b, 1 / PAPER_SPEC.z0)))

# %%
# Unloaded Q from excess insertion loss, against the classical estimate.
ncm = cmatrix.normalize(plan, PAPER_SPEC)
qu = cmatrix.fit_unloaded_q(ncm, 0.34)
print("fitted Qu = %.1f, estimate = %.1f" % (qu, cmatrix.analytic_unloaded_q(g, PAPER_SPEC.fbw, 0.34)))
lossy = cmatrix.sweep(cmatrix.apply_uniform_loss(ncm, qu), cmatrix.default_grid())
print("IL at f0 with loss: %.3f dB" % cmatrix.metrics(lossy, PAPER_SPEC).il_at_f0_db[0])

# %%
# Detune M23 by 5 % and let the simplex search bring the match back.
bad = plan.with_couplings((plan.m_chain[0], plan.m_chain[1] * 1.05), plan.qe_in, plan.qe_out)
ev = cmatrix.s11_evaluator(PAPER_SPEC)
band = cmatrix.ripple_band(f0, PAPER_SPEC.fbw)
fixed = refine_couplings(bad, 20.0, band, ev)
for name, p in (("detuned", bad), ("refined", fixed)):
    rl = cmatrix.metrics(cmatrix.sweep(cmatrix.normalize(p, PAPER_SPEC), cmatrix.default_grid()), PAPER_SPEC)
    print(f"{name}: M = {p.m_chain}, Qe = {p.qe_in:.3f}, worst RL = {rl.worst_in_band_rl_db:.2f} dB")
