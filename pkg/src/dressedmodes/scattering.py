"""State-dependent impedance and scattering matrices of the two-port system.

Each normal mode is attached to a transmission line of impedance
``Z_port_i = Q_i sqrt(L_i / C_i)``. For a system prepared in eigenstate ``s``
the linear-response impedance is

    Z_ij(f) = (4 pi i f / h) sum_k  df_k / (df_k^2 - f^2) <s|Phi_i|k><k|Phi_j|s>

with ``df_k = E_k - E_s`` (GHz) and ``Phi_i`` the normal-mode flux operators in
Wb. ``Z`` is purely imaginary, so the model is lossless; internal loss would
enter as a real part added to ``Z`` (see :func:`scattering_matrix`, which accepts
any complex ``Z``), but no loss model is provided.

Scattering matrices are returned for power waves by default,
``S = (z + I)^-1 (z - I)`` with ``z = Z0^-1/2 Z Z0^-1/2``, which is unitary for
imaginary ``Z`` and symmetric. ``normalization="voltage"`` gives
``(Z Z0^-1 + I)^-1 (Z Z0^-1 - I)`` for voltage waves; the two differ only in
the off-diagonal entries, by the factor ``sqrt(Z_port_R / Z_port_Q)``.

The sign of ``Z_RQ`` (and of ``S_RQ``) depends on the sign conventions of the
mode coordinates; diagonal entries and magnitudes do not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .normal_modes import NormalModeBasis
from .oscillator import phase_matrix
from .params import CONSTANTS, NumericalError
from .spectrum import LabeledSpectrum, parse_state, state_name

__all__ = [
    "PortConfig",
    "ResonantProbeError",
    "flux_operators",
    "ImpedanceModel",
    "impedance_matrix",
    "scattering_matrix",
    "ScatteringResult",
    "scattering_sweep",
    "avoid_poles",
    "phase_roll_center",
]

DEFAULT_Q_R = 1.5e3
DEFAULT_Q_Q = 7.5e5


class ResonantProbeError(NumericalError):
    pass


@dataclass(frozen=True)
class PortConfig:
    """Quality factors and the resulting port impedances (Ohm)."""

    Q_R: float
    Q_Q: float
    Z_R: float
    Z_Q: float

    def __post_init__(self):
        if min(self.Q_R, self.Q_Q, self.Z_R, self.Z_Q) <= 0:
            raise ValueError("quality factors and port impedances must be positive")

    @classmethod
    def from_basis(cls, basis: NormalModeBasis, Q_R: float = DEFAULT_Q_R, Q_Q: float = DEFAULT_Q_Q):
        return cls(Q_R, Q_Q, Q_R * basis.Z_R, Q_Q * basis.Z_Q)

    @property
    def Z0(self) -> np.ndarray:
        return np.diag([self.Z_R, self.Z_Q])


def flux_operators(spec: LabeledSpectrum, basis: NormalModeBasis) -> tuple[np.ndarray, np.ndarray]:
    """Normal-mode flux operators ``Phi_R``, ``Phi_Q`` (Wb) in the energy eigenbasis."""
    if spec.eigvecs is None:
        raise ValueError("spectrum was computed without eigenvectors")
    nR, nQ = spec.trunc.n0 + 1, spec.trunc.m0 + 1
    phi0 = CONSTANTS.reduced_flux_quantum
    op_R = np.kron(phase_matrix(phi0 * basis.phi_zpf_R, nR), np.eye(nQ))
    op_Q = np.kron(np.eye(nR), phase_matrix(phi0 * basis.phi_zpf_Q, nQ))
    V = spec.eigvecs
    return V.T @ op_R @ V, V.T @ op_Q @ V


def _as_weights(spec: LabeledSpectrum, state) -> np.ndarray:
    """Eigenstate populations from a label, token, index array or mapping."""
    w = np.zeros(spec.energies.size)
    if isinstance(state, str):
        state = parse_state(state)
    if isinstance(state, tuple):
        w[spec.index(*state)] = 1.0
    elif isinstance(state, Mapping):
        for key, p in state.items():
            key = parse_state(key) if isinstance(key, str) else key
            w[spec.index(*key)] += p
    else:
        w = np.asarray(state, dtype=float)
        if w.shape != spec.energies.shape:
            raise ValueError("population vector must have one entry per eigenstate")
    if np.any(w < 0) or not math.isclose(w.sum(), 1.0, rel_tol=1e-9):
        raise ValueError("populations must be non-negative and sum to 1")
    return w


class ImpedanceModel:
    """Pole expansion of ``Z(f)`` for one prepared state or population mixture.

    Parameters
    ----------
    spec : LabeledSpectrum
        Must carry eigenvectors.
    basis : NormalModeBasis
    state : str, (n, mu), mapping of populations, or population vector
    """

    def __init__(self, spec: LabeledSpectrum, basis: NormalModeBasis, state):
        self.state = state
        weights = _as_weights(spec, state)
        PR, PQ = flux_operators(spec, basis)
        poles, residues = [], []
        E = spec.energies
        for s in np.nonzero(weights)[0]:
            df = E - E[s]
            keep = np.arange(E.size) != s
            a, b = PR[s, keep], PQ[s, keep]
            M = np.stack([np.stack([a * a, a * b]), np.stack([b * a, b * b])])  # (2, 2, K)
            poles.append(df[keep])
            residues.append(weights[s] * M)
        self.df = np.concatenate(poles)
        self.M = np.concatenate(residues, axis=2)

    @property
    def pole_frequencies(self) -> np.ndarray:
        """Positive probe frequencies (GHz) at which ``Z`` diverges."""
        return np.unique(np.abs(self.df))

    def __call__(self, freqs) -> np.ndarray:
        """``Z`` in Ohm at probe frequencies ``freqs`` (GHz); shape ``(F, 2, 2)``."""
        f = np.atleast_1d(np.asarray(freqs, dtype=float))
        on_pole = np.abs(np.abs(self.df)[None, :] - f[:, None]) <= 1e-12 * np.maximum(f[:, None], 1.0)
        if np.any(on_pole):
            bad = f[np.any(on_pole, axis=1)][0]
            raise ResonantProbeError(
                f"resonant probe at {bad!r} GHz sits on a transition pole; offset it slightly (see avoid_poles)"
            )
        g = self.df[None, :] / (self.df[None, :] ** 2 - f[:, None] ** 2)  # (F, K)
        Z = np.einsum("fk,ijk->fij", g, self.M)
        return (4j * math.pi / CONSTANTS.planck) * f[:, None, None] * Z


def impedance_matrix(spec: LabeledSpectrum, basis: NormalModeBasis, state, probe_freq: float) -> np.ndarray:
    """2x2 impedance matrix (Ohm) at a single probe frequency (GHz)."""
    return ImpedanceModel(spec, basis, state)(probe_freq)[0]


def scattering_matrix(Z, ports: PortConfig, normalization: str = "power") -> np.ndarray:
    """Convert impedance matrices ``(..., 2, 2)`` to scattering matrices.

    Raises
    ------
    NumericalError
        If ``z + I`` is numerically singular.
    """
    Z = np.asarray(Z, dtype=complex)
    I = np.eye(2)
    z0 = np.array([ports.Z_R, ports.Z_Q])
    if normalization == "power":
        r = 1 / np.sqrt(z0)
        z = Z * r[:, None] * r[None, :]
    elif normalization == "voltage":
        z = Z / z0[None, :]
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    A = z + I
    cond = np.linalg.cond(A)
    if np.any(~np.isfinite(cond)) or np.any(cond > 1e14):
        raise NumericalError(f"Z Z0^-1 + I is singular (condition number {np.max(cond):.3g})")
    return np.linalg.solve(A, z - I)


def avoid_poles(freqs, poles, guard: float = 1e-9, shift: float = 1e-6) -> np.ndarray:
    """Move grid points lying within ``guard`` GHz of a pole by ``shift`` GHz."""
    f = np.array(freqs, dtype=float)
    poles = np.asarray(poles, dtype=float)
    if poles.size:
        near = np.abs(f[:, None] - poles[None, :]).min(axis=1) < guard
        f[near] += shift
    return f


@dataclass(frozen=True)
class ScatteringResult:
    state: object
    probe_freqs: np.ndarray
    Z: np.ndarray
    S: np.ndarray

    @property
    def state_label(self) -> str:
        if isinstance(self.state, tuple):
            return state_name(*self.state)
        return str(self.state) if isinstance(self.state, str) else "mixed"

    def rows(self) -> list[tuple]:
        """CSV rows: f_GHz, state, re/im of S_RR, S_RQ, S_QQ."""
        out = []
        for f, S in zip(self.probe_freqs, self.S):
            out.append((float(f), self.state_label,
                        S[0, 0].real, S[0, 0].imag, S[0, 1].real, S[0, 1].imag, S[1, 1].real, S[1, 1].imag))
        return out


CSV_HEADER = ("f_GHz", "state", "re_S_RR", "im_S_RR", "re_S_RQ", "im_S_RQ", "re_S_QQ", "im_S_QQ")


def scattering_sweep(
    spec: LabeledSpectrum,
    basis: NormalModeBasis,
    ports: PortConfig,
    states: Sequence,
    freqs,
    normalization: str = "power",
) -> list[ScatteringResult]:
    """Scattering matrices over a probe-frequency grid for each prepared state."""
    results = []
    for state in states:
        model = ImpedanceModel(spec, basis, state)
        f = avoid_poles(freqs, model.pole_frequencies)
        Z = model(f)
        results.append(ScatteringResult(state, f, Z, scattering_matrix(Z, ports, normalization)))
    return results


def phase_roll_center(freqs, s) -> float:
    """Frequency where the unwrapped phase of ``s`` changes fastest (linear interpolation of the midpoint)."""
    f = np.asarray(freqs, dtype=float)
    ph = np.unwrap(np.angle(np.asarray(s)))
    df = np.diff(f)
    # repeated grid points (possible after pole avoidance) carry no slope information
    slope = np.abs(np.divide(np.diff(ph), df, out=np.zeros_like(df), where=df != 0))
    i = int(np.argmax(slope))
    return float(0.5 * (f[i] + f[i + 1]))
