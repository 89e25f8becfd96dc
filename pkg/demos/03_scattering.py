"""
State-dependent reflection at the two ports
===========================================

The impedance seen at each port depends on the prepared state. The readout
resonance moves by chi when the qubit is excited, and the qubit line moves
with the photon number in the readout mode.
"""

# %%
import math

import numpy as np

from dressedmodes import PortConfig, dispersive_shift, load_device, scattering_sweep, solve_normal_modes, solve_spectrum
from dressedmodes.scattering import phase_roll_center

params = load_device("A")
basis = solve_normal_modes(params)
spec = solve_spectrum(params, math.pi)
ports = PortConfig.from_basis(basis)  # Q_R = 1.5e3, Q_Q = 7.5e5

# %%
# Readout port: where does arg S_RR roll, for the qubit in g and in e?
for state, mu in (("0g", 0), ("0e", 1)):
    f01 = spec.energy(1, mu) - spec.energy(0, mu)
    freqs = np.linspace(f01 - 0.05, f01 + 0.05, 20001)
    (res,) = scattering_sweep(spec, basis, ports, [state], freqs)
    print(f"{state}: readout roll centred at {phase_roll_center(freqs, res.S[:, 0, 0]):.6f} GHz")
print(f"chi = {dispersive_shift(spec) * 1e3:.3f} MHz")

# %%
# Qubit port: the g->e feature for zero and one readout photon.
for state, n in (("0g", 0), ("1g", 1)):
    fge = spec.energy(n, 1) - spec.energy(n, 0)
    freqs = np.linspace(fge - 1e-3, fge + 1e-3, 20001)
    (res,) = scattering_sweep(spec, basis, ports, [state], freqs)
    print(f"{state}: qubit-port roll centred at {phase_roll_center(freqs, res.S[:, 1, 1]):.6f} GHz")
