"""
Lumped circuit and the nodal-analysis cross-check
=================================================

Realize the coupling plan as shunt LC tanks joined by admittance inverters
and simulate it with nodal analysis. With ideal inverters the two engines
agree to rounding error; an inductive pi realization is close in band.
"""

import numpy as np

from fpdsynth import cmatrix
from fpdsynth.mna import ac_sparams, build_divider_netlist, format_netlist
from fpdsynth.prototype import preset
from fpdsynth.synthesis import PAPER_SPEC, build_coupling_plan

plan = build_coupling_plan(PAPER_SPEC, preset("paper-3rd-order-20dB"))
circuit = build_divider_netlist(plan, PAPER_SPEC)

# Inverter values expressed as inductors at f0, 1/(w0 J).
for label, j, l_eq in circuit.inverters[:2] + circuit.inverters[4:6]:
    print(f"{label:7s} J = {j:.5f} S  ->  {l_eq * 1e9:.4f} nH")
print("tank: C = %.3f pF, L = %.4f nH" % (circuit.c * 1e12, circuit.l_r * 1e9))
print(format_netlist(circuit.netlist))

f = cmatrix.default_grid()
ref = cmatrix.sweep(cmatrix.normalize(plan, PAPER_SPEC), f)
ideal = ac_sparams(circuit.netlist, f)
print("max |dS| ideal vs coupling matrix:", np.abs(ideal.s - ref.s).max())

# %%
# Inductive pi inverters are exact only at f0.
pi = ac_sparams(build_divider_netlist(plan, PAPER_SPEC, "pi").netlist, f)
inband = np.abs(cmatrix.lowpass_p(f, PAPER_SPEC.f0, PAPER_SPEC.fbw)) <= 1
print("pi in-band |dS21| max: %.4f dB" % np.abs(pi.db(2, 1) - ref.db(2, 1))[inband].max())
print("pi reflection zeros (GHz):", np.round(np.array(cmatrix.metrics(pi, PAPER_SPEC).reflection_zeros) / 1e9, 5))
