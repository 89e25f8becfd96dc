import math
import warnings

import pytest
from hypothesis import given, strategies as st

from dressedmodes.params import (
    CONSTANTS,
    CircuitParams,
    ConfigError,
    dump_params,
    flux_to_phase,
    load_device,
    load_params,
    phase_to_flux,
)

VALID = """
# comment line
C_r = 20.3 fF
L_r = 15.6 nH   # trailing comment
C_q = 5.3 fF
L_q = 386 nH
E_J = 6.20 GHz
L_s = 4.5 nH
"""


def test_constants():
    assert CONSTANTS.impedance_quantum == pytest.approx(1027.0, abs=0.5)
    assert CONSTANTS.flux_quantum == pytest.approx(2.067833848e-15, rel=1e-9)
    assert CONSTANTS.reduced_flux_quantum == pytest.approx(CONSTANTS.flux_quantum / (2 * math.pi))
    assert CONSTANTS.ghz_to_joule(1.0) == pytest.approx(CONSTANTS.planck * 1e9)


def test_load_valid():
    p = load_params(VALID)
    assert p == CircuitParams(20.3, 15.6, 5.3, 386.0, 6.2, 4.5)
    assert p.in_regime


def test_bundled_devices():
    a, b = load_device("deviceA"), load_device("B")
    assert a.as_dict() == {"C_r": 20.3, "L_r": 15.6, "C_q": 5.3, "L_q": 386.0, "E_J": 6.2, "L_s": 4.5}
    assert b.as_dict() == {"C_r": 20.1, "L_r": 19.7, "C_q": 5.9, "L_q": 430.0, "E_J": 9.08, "L_s": 2.9}
    with pytest.raises(ConfigError):
        load_device("C")


def test_si_units(device_a):
    si = device_a.si
    assert si["C_r"] == pytest.approx(20.3e-15)
    assert si["L_q"] == pytest.approx(386e-9)
    assert si["E_J"] == pytest.approx(6.2e9 * CONSTANTS.planck)


@pytest.mark.parametrize(
    "text, kind",
    [
        (VALID.replace("C_r = 20.3 fF", "C_r 20.3 fF"), "syntax"),
        (VALID + "X_y = 1 nH\n", "unknown key"),
        (VALID + "L_s = 1 nH\n", "duplicate key"),
        (VALID.replace("4.5 nH", "4.5"), "missing unit"),
        (VALID.replace("4.5 nH", "4.5 pH"), "wrong unit"),
        (VALID.replace("4.5 nH", "4,5 nH"), "malformed number"),
        (VALID.replace("4.5 nH", "inf nH"), "malformed number"),
        (VALID.replace("L_s = 4.5 nH", ""), "missing key"),
    ],
)
def test_load_errors(text, kind):
    with pytest.raises(ConfigError) as info:
        load_params(text)
    assert info.value.kind == kind


@pytest.mark.parametrize("field", ["C_r", "L_r", "C_q", "L_q"])
def test_nonpositive_rejected(device_a, field):
    with pytest.raises(ValueError):
        device_a.replace(**{field: 0.0})
    with pytest.raises(ValueError):
        device_a.replace(**{field: math.nan})


@pytest.mark.parametrize("field", ["L_s", "E_J"])
def test_zero_limits_allowed(device_a, field):
    assert getattr(device_a.replace(**{field: 0.0}), field) == 0.0
    with pytest.raises(ValueError):
        device_a.replace(**{field: -1.0})
    with pytest.raises(ValueError):
        device_a.replace(**{field: math.inf})


def test_regime_warning():
    text = VALID.replace("386 nH", "50 nH")
    with pytest.warns(UserWarning, match="L_q"):
        p = load_params(text)
    assert not p.in_regime
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        load_params(text, warn_regime=False)


positive = st.floats(1e-2, 1e3, allow_nan=False, allow_infinity=False)


@given(positive, positive, positive, st.floats(50, 1e4), positive, st.floats(0, 10))
def test_dump_load_roundtrip(C_r, L_r, C_q, L_q, E_J, L_s):
    p = CircuitParams(C_r, L_r, C_q, L_q, E_J, L_s)
    assert load_params(dump_params(p), warn_regime=False) == p


@given(st.floats(-3, 3))
def test_flux_phase_inverse(x):
    assert phase_to_flux(flux_to_phase(x)) == pytest.approx(x, abs=1e-15)
    assert flux_to_phase(0.5) == pytest.approx(math.pi)
