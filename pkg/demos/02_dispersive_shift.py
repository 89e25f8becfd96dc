"""
Dispersive shift: exact versus second-order perturbation theory
===============================================================

The two routes agree far from resonances and part ways where a qubit
transition approaches the readout frequency.
"""

# %%
import math

import numpy as np

from dressedmodes import (
    dispersive_shift,
    kerr,
    load_device,
    perturbative_chi,
    perturbative_spectrum,
    solve_normal_modes,
    sweep,
)

params = load_device("A")
basis = solve_normal_modes(params)
flux = np.linspace(0.0, 0.5, 51)
spectra = sweep(params, flux)

# %%
# Side by side along the sweep; large ratios mark the anticrossings.
print(" Phi/Phi0   chi_exact[MHz]   chi_pert[MHz]   K_g[MHz]   K_e[MHz]")
for x, spec in zip(flux, spectra):
    exact = dispersive_shift(spec)
    pert = perturbative_chi(perturbative_spectrum(basis, params.E_J, 2 * math.pi * x))
    print(f"{x:9.3f} {exact * 1e3:16.3f} {pert * 1e3:15.3f} {kerr(spec, 0) * 1e3:10.4f} {kerr(spec, 1) * 1e3:10.4f}")
