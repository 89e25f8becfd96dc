"""Normal modes of the linearized (E_J -> 0) readout-qubit circuit.

The bare fluxes are written as ``Phi_r = l1 Phi_R + l2 Phi_Q`` and
``Phi_q = l3 Phi_R + l4 Phi_Q``. Columns ``(l1, l3)`` and ``(l2, l4)`` are the
generalized eigenvectors of ``U v = w^2 C v`` with ``C = diag(C_r, C_q)`` and
``U`` the Hessian of the linear potential, each scaled to unit Euclidean norm
with the dominant component positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import CONSTANTS, CircuitParams, NumericalError

__all__ = [
    "NormalModeBasis",
    "ApplicabilityReport",
    "potential_hessian",
    "mode_parameters",
    "solve_normal_modes",
    "check_applicability",
]


@dataclass(frozen=True)
class NormalModeBasis:
    """Dressed-mode coefficients and the harmonic parameters of each mode.

    Units: capacitance fF, inductance nH, angular frequency rad/s, impedance Ohm.
    """

    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float
    C_R: float
    C_Q: float
    L_R: float
    L_Q: float

    @property
    def omega_R(self) -> float:
        return 1e12 / math.sqrt(self.L_R * self.C_R)

    @property
    def omega_Q(self) -> float:
        return 1e12 / math.sqrt(self.L_Q * self.C_Q)

    @property
    def f_R(self) -> float:
        """Readout-mode frequency in GHz."""
        return self.omega_R / (2 * math.pi) / 1e9

    @property
    def f_Q(self) -> float:
        return self.omega_Q / (2 * math.pi) / 1e9

    @property
    def Z_R(self) -> float:
        return 1e3 * math.sqrt(self.L_R / self.C_R)

    @property
    def Z_Q(self) -> float:
        return 1e3 * math.sqrt(self.L_Q / self.C_Q)

    @property
    def phi_zpf_R(self) -> float:
        return math.sqrt(self.Z_R / (2 * CONSTANTS.impedance_quantum))

    @property
    def phi_zpf_Q(self) -> float:
        return math.sqrt(self.Z_Q / (2 * CONSTANTS.impedance_quantum))

    @property
    def flux_zpf_R(self) -> float:
        """Zero-point flux of mode R in Wb."""
        return CONSTANTS.reduced_flux_quantum * self.phi_zpf_R

    @property
    def flux_zpf_Q(self) -> float:
        return CONSTANTS.reduced_flux_quantum * self.phi_zpf_Q

    @property
    def matrix(self) -> np.ndarray:
        """``[[l1, l2], [l3, l4]]``; maps (Phi_R, Phi_Q) to (Phi_r, Phi_q)."""
        return np.array([[self.lambda1, self.lambda2], [self.lambda3, self.lambda4]])

    def as_dict(self) -> dict[str, float]:
        return {
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "lambda3": self.lambda3,
            "lambda4": self.lambda4,
            "one_minus_lambda1": 1 - self.lambda1,
            "one_minus_lambda4": 1 - self.lambda4,
            "C_R_fF": self.C_R,
            "C_Q_fF": self.C_Q,
            "L_R_nH": self.L_R,
            "L_Q_nH": self.L_Q,
            "f_R_GHz": self.f_R,
            "f_Q_GHz": self.f_Q,
            "Z_R_Ohm": self.Z_R,
            "Z_Q_Ohm": self.Z_Q,
            "phi_zpf_R": self.phi_zpf_R,
            "phi_zpf_Q": self.phi_zpf_Q,
        }


def potential_hessian(params: CircuitParams) -> np.ndarray:
    """Inverse-inductance matrix of the linearized circuit, in 1/nH."""
    Lrs = params.L_r + params.L_s
    k = params.L_s / (params.L_q * Lrs)
    return np.array([[1 / Lrs, -k], [-k, 1 / params.L_q]])


def mode_parameters(params: CircuitParams, l1: float, l2: float, l3: float, l4: float):
    """Normal-mode (C_R, C_Q, L_R, L_Q) for given mixing coefficients."""
    Lrs = params.L_r + params.L_s
    cross = 2 * params.L_s / (params.L_q * Lrs)
    C_R = l1**2 * params.C_r + l3**2 * params.C_q
    C_Q = l2**2 * params.C_r + l4**2 * params.C_q
    inv_L_R = l1**2 / Lrs + l3**2 / params.L_q - cross * l1 * l3
    inv_L_Q = l2**2 / Lrs + l4**2 / params.L_q - cross * l2 * l4
    return C_R, C_Q, 1 / inv_L_R, 1 / inv_L_Q


def _null_vector(U: np.ndarray, C: np.ndarray, w: float) -> np.ndarray:
    # Two candidate kernel vectors of the 2x2 matrix U - w C; keep the better conditioned one.
    A = U - w * C
    a = np.array([-A[0, 1], A[0, 0]])
    b = np.array([A[1, 1], -A[1, 0]])
    v = a if np.hypot(*a) >= np.hypot(*b) else b
    return v / np.hypot(*v)


def solve_normal_modes(params: CircuitParams) -> NormalModeBasis:
    """Closed-form solution of the 2x2 generalized eigenproblem.

    Mode R is the eigenvector whose weight on the readout coordinate is
    larger; this holds even if the two frequencies cross during a fit.

    Raises
    ------
    NumericalError
        If the matrices are not positive definite or the two eigenfrequencies
        coincide to 1e-9 relative.
    """
    U = potential_hessian(params)
    C = np.diag([params.C_r, params.C_q])
    # det(U - w C) = a w^2 + b w + c
    a = params.C_r * params.C_q
    b = -(U[0, 0] * params.C_q + U[1, 1] * params.C_r)
    c = U[0, 0] * U[1, 1] - U[0, 1] ** 2
    if c <= 0 or U[0, 0] <= 0:
        raise NumericalError("inductance matrix is not positive definite")
    # b^2 - 4ac rewritten as a sum of squares: no cancellation near degeneracy
    disc = (U[0, 0] * params.C_q - U[1, 1] * params.C_r) ** 2 + 4 * a * U[0, 1] ** 2
    q = -0.5 * (b - math.sqrt(disc))  # b < 0, so this avoids cancellation
    w_hi, w_lo = q / a, c / q
    if abs(w_hi - w_lo) <= 1e-9 * abs(w_hi):
        raise NumericalError("modes unresolvable: degenerate eigenfrequencies")

    v_hi = _null_vector(U, C, w_hi)
    v_lo = _null_vector(U, C, w_lo)
    # readout-dominance of each vector decides the labels
    if abs(v_hi[0]) >= abs(v_lo[0]):
        v_R, v_Q = v_hi, v_lo
    else:
        v_R, v_Q = v_lo, v_hi
    if v_R[0] < 0:
        v_R = -v_R
    if v_Q[1] < 0:
        v_Q = -v_Q
    l1, l3 = float(v_R[0]), float(v_R[1])
    l2, l4 = float(v_Q[0]), float(v_Q[1])
    C_R, C_Q, L_R, L_Q = mode_parameters(params, l1, l2, l3, l4)
    return NormalModeBasis(l1, l2, l3, l4, C_R, C_Q, L_R, L_Q)


@dataclass(frozen=True)
class ApplicabilityReport:
    """Diagnostics on whether the dressed-basis method is well suited.

    ``criterion_as_printed`` evaluates ``turns_ratio < hybridization``;
    ``criterion_reversed`` evaluates the opposite inequality. Both are
    reported and neither is enforced.
    """

    turns_ratio: float
    hybridization: float
    criterion_as_printed: bool
    criterion_reversed: bool
    Z_R: float
    Z_Q: float
    impedance_quantum: float
    messages: tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "turns_ratio": self.turns_ratio,
            "hybridization": self.hybridization,
            "criterion_as_printed": self.criterion_as_printed,
            "criterion_reversed": self.criterion_reversed,
            "Z_R_Ohm": self.Z_R,
            "Z_Q_Ohm": self.Z_Q,
            "R_Q_Ohm": self.impedance_quantum,
        }


def check_applicability(
    params: CircuitParams, basis: NormalModeBasis, low_impedance_factor: float = 1.0
) -> ApplicabilityReport:
    """Report the turns-ratio/hybridization comparison and mode impedances.

    A mode is flagged as unsuitable for a truncated cosine expansion when its
    impedance exceeds ``low_impedance_factor * R_Q``.
    """
    turns = params.L_s / (params.L_r + params.L_s)
    hyb = abs(basis.lambda3) / basis.lambda4
    RQ = CONSTANTS.impedance_quantum
    msgs = []
    for name, Z in (("R", basis.Z_R), ("Q", basis.Z_Q)):
        if Z > low_impedance_factor * RQ:
            msgs.append(f"cosine truncation invalid for mode {name} (Z={Z:.4g} Ohm > R_Q={RQ:.4g} Ohm)")
    if not params.in_regime:
        msgs.append("L_q is not much larger than L_r + L_s")
    return ApplicabilityReport(
        turns_ratio=turns,
        hybridization=hyb,
        criterion_as_printed=turns < hyb,
        criterion_reversed=turns > hyb,
        Z_R=basis.Z_R,
        Z_Q=basis.Z_Q,
        impedance_quantum=RQ,
        messages=tuple(msgs),
    )
