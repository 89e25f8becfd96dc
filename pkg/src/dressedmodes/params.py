"""Physical constants, circuit parameters and the plain-text config format.

Working units throughout the package: capacitance in fF, inductance in nH,
energies as frequencies in GHz (E/h), impedance in Ohm, phases dimensionless.

Config grammar
--------------
One ``key = value unit`` assignment per line. Blank lines and anything after
``#`` are ignored. Exactly the six keys below must appear once each::

    C_r = 20.3 fF
    L_r = 15.6 nH
    C_q = 5.3  fF
    L_q = 386  nH
    E_J = 6.20 GHz
    L_s = 4.5  nH

The unit suffix is mandatory and must match the key (fF for capacitances,
nH for inductances, GHz for ``E_J``). ``L_s`` may be zero (decoupled circuit);
every other value must be strictly positive.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import asdict, dataclass, fields
from importlib import resources

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "CircuitParams",
    "ConfigError",
    "NumericalError",
    "load_params",
    "dump_params",
    "load_device",
    "flux_to_phase",
    "phase_to_flux",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants (exact values of the 2019 SI redefinition)."""

    planck: float = 6.62607015e-34
    elementary_charge: float = 1.602176634e-19

    @property
    def hbar(self) -> float:
        return self.planck / (2 * math.pi)

    @property
    def reduced_flux_quantum(self) -> float:
        """Phi_0 / 2pi = hbar / 2e, in Wb."""
        return self.hbar / (2 * self.elementary_charge)

    @property
    def flux_quantum(self) -> float:
        return self.planck / (2 * self.elementary_charge)

    @property
    def impedance_quantum(self) -> float:
        """R_Q = hbar / (2e)^2, in Ohm."""
        return self.hbar / (2 * self.elementary_charge) ** 2

    def ghz_to_joule(self, f_ghz: float) -> float:
        return f_ghz * 1e9 * self.planck


CONSTANTS = PhysicalConstants()


class ConfigError(ValueError):
    """Invalid user input. ``kind`` is a short machine-readable tag."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class NumericalError(RuntimeError):
    """A numerical routine could not meet its contract."""


_UNITS = {"C_r": "fF", "L_r": "nH", "C_q": "fF", "L_q": "nH", "E_J": "GHz", "L_s": "nH"}


@dataclass(frozen=True)
class CircuitParams:
    """Lumped elements of the reduced fluxonium-readout circuit.

    Attributes
    ----------
    C_r, C_q : float
        Readout (antenna) and small-junction capacitances in fF.
    L_r, L_q, L_s : float
        Unshared readout, unshared qubit and shared inductances in nH.
    E_J : float
        Josephson energy of the small junction in GHz.
    """

    C_r: float
    L_r: float
    C_q: float
    L_q: float
    E_J: float
    L_s: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError("malformed number", f"{f.name}={value!r}")
            if f.name in ("L_s", "E_J"):
                # zero is the decoupled (L_s) or harmonic (E_J) limit
                if value < 0:
                    raise ConfigError("non-positive value", f"{f.name}={value} must be >= 0")
            elif value <= 0:
                raise ConfigError("non-positive value", f"{f.name}={value} must be > 0")

    @property
    def in_regime(self) -> bool:
        """True when L_q >= 5 (L_r + L_s), the limit the two-mode Lagrangian assumes."""
        return self.L_q >= 5 * (self.L_r + self.L_s)

    def replace(self, **changes) -> "CircuitParams":
        d = self.as_dict()
        d.update(changes)
        return CircuitParams(**d)

    def as_dict(self) -> dict[str, float]:
        d = asdict(self)
        return {k: d[k] for k in _UNITS}

    # SI views
    @property
    def si(self) -> dict[str, float]:
        return {
            "C_r": self.C_r * 1e-15,
            "L_r": self.L_r * 1e-9,
            "C_q": self.C_q * 1e-15,
            "L_q": self.L_q * 1e-9,
            "E_J": CONSTANTS.ghz_to_joule(self.E_J),
            "L_s": self.L_s * 1e-9,
        }


_LINE = re.compile(r"^\s*([A-Za-z_]+)\s*=\s*(\S+)\s*(\S+)?\s*$")


def load_params(text: str, *, warn_regime: bool = True) -> CircuitParams:
    """Parse the config grammar described in the module docstring."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise ConfigError("syntax", f"line {lineno}: expected 'key = value unit', got {raw!r}")
        key, number, unit = m.groups()
        if key not in _UNITS:
            raise ConfigError("unknown key", f"line {lineno}: {key!r}")
        if key in values:
            raise ConfigError("duplicate key", f"line {lineno}: {key!r}")
        if unit is None:
            raise ConfigError("missing unit", f"line {lineno}: {key} needs unit {_UNITS[key]}")
        if unit != _UNITS[key]:
            raise ConfigError("wrong unit", f"line {lineno}: {key} expects {_UNITS[key]}, got {unit}")
        try:
            value = float(number)
        except ValueError:
            raise ConfigError("malformed number", f"line {lineno}: {number!r}") from None
        if not math.isfinite(value):
            raise ConfigError("malformed number", f"line {lineno}: {number!r}")
        values[key] = value
    missing = [k for k in _UNITS if k not in values]
    if missing:
        raise ConfigError("missing key", ", ".join(missing))
    params = CircuitParams(**values)
    if warn_regime and not params.in_regime:
        warnings.warn(
            f"L_q={params.L_q} nH is not >> L_r + L_s = {params.L_r + params.L_s} nH; "
            "the two-mode Lagrangian may be inaccurate",
            stacklevel=2,
        )
    return params


def dump_params(params: CircuitParams) -> str:
    """Inverse of :func:`load_params`; ``repr`` keeps full float precision."""
    return "".join(f"{k} = {v!r} {_UNITS[k]}\n" for k, v in params.as_dict().items())


def load_device(name: str) -> CircuitParams:
    """Load one of the bundled parameter sets (``"A"``/``"deviceA"``, ``"B"``/``"deviceB"``)."""
    key = name.removeprefix("device").removeprefix("_").upper()
    if key not in ("A", "B"):
        raise ConfigError("unknown device", name)
    text = resources.files("dressedmodes.data").joinpath(f"device_{key}.cfg").read_text()
    return load_params(text)


def flux_to_phase(flux_over_phi0):
    """Phi_ext / Phi_0 -> phi_ext = 2 pi Phi_ext / Phi_0 (radians)."""
    return 2 * math.pi * flux_over_phi0


def phase_to_flux(phi_ext):
    return phi_ext / (2 * math.pi)
