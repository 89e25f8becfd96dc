"""
Normal modes and the flux-dependent spectrum
============================================

The linear part of the fluxonium-readout circuit is solved exactly first. Its
two normal modes become the basis in which the junction cosine is expanded.
"""

# %%
# Load a bundled parameter set and solve the linear problem.
import numpy as np

from dressedmodes import check_applicability, load_device, solve_normal_modes, sweep, transitions

params = load_device("A")
basis = solve_normal_modes(params)
for key, value in basis.as_dict().items():
    print(f"{key:>18s} = {value:.6g}")

# %%
# The qubit mode has a large impedance, so its phase fluctuates by about 2 rad
# and a Taylor expansion of the cosine would not converge. The diagnostics say so.
report = check_applicability(params, basis)
print(report.as_dict())
print("\n".join(report.messages))

# %%
# Sweep half a flux quantum and follow the qubit and readout transitions.
flux = np.linspace(0.0, 0.5, 11)
for spec in sweep(params, flux):
    t = transitions(spec)
    print(f"Phi/Phi0 = {spec.flux_over_phi0:.2f}   f_ge = {t['f_ge']:.4f} GHz   f_01 = {t['f_01']:.4f} GHz")
