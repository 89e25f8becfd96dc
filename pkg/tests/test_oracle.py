import math

import numpy as np
import pytest

from dressedmodes.hamiltonian import TruncationScheme
from dressedmodes.normal_modes import solve_normal_modes
from dressedmodes.oracle import (
    bare_basis_oracle,
    bare_hamiltonian,
    compare_with_oracle,
    converged_levels,
    dressed_levels,
)


def test_bare_uncoupled_harmonic_limit(device_a):
    p = device_a.replace(E_J=0.0, L_s=0.0)
    t = TruncationScheme(3, 5)
    E = bare_basis_oracle(p, 0.0, t)
    f_r = 1 / math.sqrt(p.L_r * p.C_r) * 1e12 / (2 * math.pi) / 1e9
    f_q = 1 / math.sqrt(p.L_q * p.C_q) * 1e12 / (2 * math.pi) / 1e9
    ref = np.sort(np.add.outer(f_r * np.arange(4), f_q * np.arange(6)).ravel())
    np.testing.assert_allclose(E, ref, atol=1e-12)


def test_bare_linear_coupling_reproduces_normal_modes(device_a):
    # with the junction off, the bilinear coupling must rebuild the normal-mode ladder
    p = device_a.replace(E_J=0.0)
    b = solve_normal_modes(p)
    E = bare_basis_oracle(p, 0.0, TruncationScheme(8, 12))[:6]
    ref = np.sort(np.add.outer(b.f_R * np.arange(3), b.f_Q * np.arange(4)).ravel())[:6]
    np.testing.assert_allclose(E - E[0], ref, atol=1e-6)


def test_bare_matrix_symmetric(device_a):
    H = bare_hamiltonian(device_a, 0.4, TruncationScheme(4, 10))
    np.testing.assert_allclose(H, H.T, atol=1e-14)


def test_compare_device_a_quarter_flux(device_a):
    c = compare_with_oracle(device_a, math.pi / 2)
    assert c.max_deviation < 1e-4
    assert c.dressed.shape == c.bare.shape == (10,)
    assert c.dressed[0] == 0.0


def test_converged_levels_reports_failure(device_a):
    with pytest.raises(RuntimeError):
        converged_levels(dressed_levels, device_a, 0.0, TruncationScheme(2, 10), tol=1e-15, max_rungs=1)
