"""
Recovering circuit parameters from spectroscopy
===============================================

Synthetic data with 0.5% multiplicative noise is generated from the device A
parameters. Starting from a guess that is 10% off in every free parameter,
the simplex fit recovers them while C_r stays fixed. Takes about a minute.
"""

# %%
import numpy as np

from dressedmodes import fit_params, load_device, synthetic_dataset

truth = load_device("A")
data = synthetic_dataset(truth, np.linspace(0.0, 0.5, 41), noise=0.005, seed=1)
guess = truth.replace(L_r=truth.L_r * 1.1, C_q=truth.C_q * 0.9, L_q=truth.L_q * 1.1, E_J=truth.E_J * 0.9,
                      L_s=truth.L_s * 1.1)

# %%
result = fit_params(data, guess, fixed=("C_r",))
print(f"converged: {result.converged} after {result.n_iter} iterations ({result.message})")
for key, value in result.params.as_dict().items():
    print(f"{key}: fitted {value:9.4f}   true {getattr(truth, key):9.4f}   start {getattr(guess, key):9.4f}")
print("per-observable RMS [MHz]:", {k: round(v * 1e3, 3) for k, v in result.rms.items()})
print(f"L_s/L_r = {result.params.L_s / result.params.L_r:.3f}")
