import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dressedmodes.hamiltonian import TruncationScheme
from dressedmodes.normal_modes import solve_normal_modes
from dressedmodes.params import NumericalError
from dressedmodes.scattering import (
    DEFAULT_Q_Q,
    DEFAULT_Q_R,
    ImpedanceModel,
    PortConfig,
    ResonantProbeError,
    avoid_poles,
    impedance_matrix,
    phase_roll_center,
    scattering_matrix,
    scattering_sweep,
)
from dressedmodes.spectrum import solve_spectrum


@pytest.fixture(scope="module")
def spec_a(device_a):
    return solve_spectrum(device_a, math.pi)


@pytest.fixture(scope="module")
def ports_a(basis_a):
    return PortConfig.from_basis(basis_a)


def test_port_impedances(basis_a, ports_a):
    assert (ports_a.Q_R, ports_a.Q_Q) == (DEFAULT_Q_R, DEFAULT_Q_Q)
    assert ports_a.Z_R == pytest.approx(1.5e3 * math.sqrt(basis_a.L_R * 1e-9 / (basis_a.C_R * 1e-15)))
    with pytest.raises(ValueError):
        PortConfig(0.0, 1.0, 1.0, 1.0)


@pytest.mark.parametrize("f", [1.0, 5.0, 7.5, 8.3, 12.0])
def test_harmonic_limit_matches_lc_impedance(device_a, f):
    p = device_a.replace(E_J=0.0)
    b = solve_normal_modes(p)
    spec = solve_spectrum(p, 0.0, TruncationScheme(3, 4))
    Z = impedance_matrix(spec, b, "0g", f)
    w = 2 * math.pi * f * 1e9
    L, C = b.L_R * 1e-9, b.C_R * 1e-15
    assert Z[0, 0] == pytest.approx(1j * w * L / (1 - w**2 * L * C), rel=1e-9)


def test_zero_impedance_is_short(ports_a):
    np.testing.assert_allclose(scattering_matrix(np.zeros((2, 2)), ports_a), -np.eye(2), atol=1e-15)


def test_matched_reactance(ports_a):
    Z = 1j * np.diag([ports_a.Z_R, ports_a.Z_Q])
    np.testing.assert_allclose(scattering_matrix(Z, ports_a), 1j * np.eye(2), atol=1e-14)


def test_singular_conversion_raises(ports_a):
    Z = -np.diag([ports_a.Z_R, ports_a.Z_Q]).astype(complex)
    with pytest.raises(NumericalError):
        scattering_matrix(Z, ports_a)
    with pytest.raises(ValueError):
        scattering_matrix(np.zeros((2, 2)), ports_a, normalization="other")


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 12.0))
def test_lossless_reciprocal(spec_a, basis_a, ports_a, f):
    model = ImpedanceModel(spec_a, basis_a, "0e")
    f = avoid_poles([f], model.pole_frequencies)
    Z = model(f)
    assert np.abs(Z.real).max() == 0.0
    np.testing.assert_allclose(Z[0, 0, 1], Z[0, 1, 0], rtol=1e-12)
    S = scattering_matrix(Z, ports_a)[0]
    np.testing.assert_allclose(S.conj().T @ S, np.eye(2), atol=1e-10)
    assert abs(S[0, 1] - S[1, 0]) < 1e-12


def test_odd_in_frequency(spec_a, basis_a):
    model = ImpedanceModel(spec_a, basis_a, "0g")
    np.testing.assert_allclose(model([-3.3]), -model([3.3]), rtol=1e-13)


def test_voltage_and_power_waves(spec_a, basis_a, ports_a):
    Z = ImpedanceModel(spec_a, basis_a, "0g")([7.6, 9.1])
    Sp = scattering_matrix(Z, ports_a, "power")
    Sv = scattering_matrix(Z, ports_a, "voltage")
    np.testing.assert_allclose(np.diagonal(Sv, axis1=1, axis2=2), np.diagonal(Sp, axis1=1, axis2=2), atol=1e-14)
    r = math.sqrt(ports_a.Z_R / ports_a.Z_Q)
    np.testing.assert_allclose(Sv[:, 0, 1], Sp[:, 0, 1] * r, rtol=1e-10)
    np.testing.assert_allclose(Sv[:, 1, 0], Sp[:, 1, 0] / r, rtol=1e-10)


def test_state_specifications_agree(spec_a, basis_a):
    f = [5.5, 7.7]
    ref = ImpedanceModel(spec_a, basis_a, "0g")(f)
    for state in [(0, 0), {"0g": 1.0}, {(0, 0): 1.0}]:
        np.testing.assert_array_equal(ImpedanceModel(spec_a, basis_a, state)(f), ref)
    w = np.zeros(spec_a.energies.size)
    w[spec_a.index(0, 0)] = 1.0
    np.testing.assert_allclose(ImpedanceModel(spec_a, basis_a, w)(f), ref, rtol=1e-15)


def test_mixture_is_population_weighted(spec_a, basis_a):
    f = [3.0, 7.9]
    mix = ImpedanceModel(spec_a, basis_a, {"0g": 0.3, "0e": 0.7})(f)
    g = ImpedanceModel(spec_a, basis_a, "0g")(f)
    e = ImpedanceModel(spec_a, basis_a, "0e")(f)
    np.testing.assert_allclose(mix, 0.3 * g + 0.7 * e, rtol=1e-12)
    with pytest.raises(ValueError):
        ImpedanceModel(spec_a, basis_a, {"0g": 0.5})


def test_residue_scales_with_flux_matrix_element(spec_a, basis_a):
    # close to a pole the diagonal impedance approaches its single-pole form
    model = ImpedanceModel(spec_a, basis_a, "0g")
    k = spec_a.index(1, 0)
    s = spec_a.index(0, 0)
    df = spec_a.energies[k] - spec_a.energies[s]
    i = np.argmin(np.abs(model.df - df))
    M = model.M[0, 0, i]
    f = df * (1 - 1e-9)
    single = (4j * math.pi / 6.62607015e-34) * f * df / (df**2 - f**2) * M
    assert model([f])[0, 0, 0] == pytest.approx(single, rel=1e-5)


def test_pole_guard(spec_a, basis_a):
    model = ImpedanceModel(spec_a, basis_a, "0g")
    pole = float(model.pole_frequencies[3])
    with pytest.raises(ResonantProbeError):
        model([pole])
    shifted = avoid_poles([pole, 1.0], model.pole_frequencies)
    assert shifted[0] == pole + 1e-6 and shifted[1] == 1.0


def test_sweep_rows_and_roll_center(spec_a, basis_a, ports_a):
    f01 = spec_a.energy(1, 0)
    freqs = np.linspace(f01 - 0.05, f01 + 0.05, 2001)
    (res,) = scattering_sweep(spec_a, basis_a, ports_a, ["0g"], freqs)
    assert res.state_label == "0g"
    rows = res.rows()
    assert len(rows) == 2001 and rows[0][1] == "0g" and len(rows[0]) == 8
    assert phase_roll_center(res.probe_freqs, res.S[:, 0, 0]) == pytest.approx(f01, abs=1e-4)
