"""Truncated Hamiltonian matrices in the dressed product basis ``|n m>``.

Index ordering is readout-major: basis state ``|n m>`` sits at ``n * (m0 + 1) + m``.
Energies are frequencies in GHz; the harmonic zero-point energies are dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .normal_modes import NormalModeBasis
from .oscillator import cos_sin_matrices
from .params import NumericalError

__all__ = [
    "TruncationScheme",
    "DEFAULT_TRUNCATION",
    "HamiltonianBlocks",
    "build_hamiltonian",
    "build_decoupled",
    "qubit_hamiltonian",
    "decoupled_qubit",
    "diagonalize",
    "eigenvalues",
]


@dataclass(frozen=True)
class TruncationScheme:
    """Inclusive Fock cutoffs: ``n <= n0`` (readout) and ``m <= m0`` (qubit)."""

    n0: int = 5
    m0: int = 20

    def __post_init__(self):
        if self.n0 < 1 or self.m0 < 1:
            raise ValueError(f"cutoffs must be >= 1, got n0={self.n0}, m0={self.m0}")

    @property
    def dim(self) -> int:
        return (self.n0 + 1) * (self.m0 + 1)


DEFAULT_TRUNCATION = TruncationScheme(5, 20)


class HamiltonianBlocks:
    """Flux-independent pieces of the dressed-basis Hamiltonian.

    The Josephson term is
    ``-E_J [cos(p) (C_R x C_Q + S_R x S_Q) + sin(p) (C_R x S_Q - S_R x C_Q)]``
    so only two scalar prefactors change along a flux sweep. Instances are
    not mutated after construction and may be shared between threads.

    Parameters
    ----------
    basis : NormalModeBasis
    E_J : float
        Josephson energy in GHz.
    trunc : TruncationScheme
    sine_signs : tuple of float
        Multipliers applied to the readout and qubit sine matrices. ``(1, 1)``
        is the standard convention; ``-1`` applies a single-mode parity
        transform and leaves the spectrum unchanged.
    """

    def __init__(
        self,
        basis: NormalModeBasis,
        E_J: float,
        trunc: TruncationScheme = DEFAULT_TRUNCATION,
        sine_signs: tuple[float, float] = (1.0, 1.0),
    ):
        self.basis = basis
        self.E_J = float(E_J)
        self.trunc = trunc
        nR, nQ = trunc.n0 + 1, trunc.m0 + 1
        self.C_R, S_R = cos_sin_matrices(basis.lambda3 * basis.phi_zpf_R, nR)
        self.C_Q, S_Q = cos_sin_matrices(basis.lambda4 * basis.phi_zpf_Q, nQ)
        self.S_R = sine_signs[0] * S_R
        self.S_Q = sine_signs[1] * S_Q
        self.diagonal = np.add.outer(basis.f_R * np.arange(nR), basis.f_Q * np.arange(nQ)).ravel()
        self.even = np.kron(self.C_R, self.C_Q) + np.kron(self.S_R, self.S_Q)
        self.odd = np.kron(self.C_R, self.S_Q) - np.kron(self.S_R, self.C_Q)

    def matrix(self, phi_ext: float) -> np.ndarray:
        """Full coupled Hamiltonian at reduced external flux ``phi_ext`` (radians)."""
        H = -self.E_J * (math.cos(phi_ext) * self.even + math.sin(phi_ext) * self.odd)
        H[np.diag_indices_from(H)] += self.diagonal
        return _symmetrize(H)

    def qubit_matrix(self, phi_ext: float) -> np.ndarray:
        """Qubit block of the decoupled Hamiltonian (readout cosine -> 1, sine -> 0)."""
        H = -self.E_J * (math.cos(phi_ext) * self.C_Q + math.sin(phi_ext) * self.S_Q)
        H[np.diag_indices_from(H)] += self.basis.f_Q * np.arange(self.trunc.m0 + 1)
        return _symmetrize(H)

    def decoupled_matrix(self, phi_ext: float) -> np.ndarray:
        nR = self.trunc.n0 + 1
        H = np.kron(np.eye(nR), self.qubit_matrix(phi_ext))
        H[np.diag_indices_from(H)] += np.repeat(self.basis.f_R * np.arange(nR), self.trunc.m0 + 1)
        return H

    def qubit_operators(self, phi_ext: float) -> tuple[np.ndarray, np.ndarray]:
        """Matrices of the cosine and sine of the qubit-block Josephson phase.

        In this sign convention the decoupled qubit Hamiltonian is
        ``f_Q m - E_J cos(theta)``; returns ``(cos(theta), sin(theta))`` for that
        same ``theta`` (needed by the perturbative corrections).
        """
        c, s = math.cos(phi_ext), math.sin(phi_ext)
        return c * self.C_Q + s * self.S_Q, s * self.C_Q - c * self.S_Q


def _symmetrize(H: np.ndarray) -> np.ndarray:
    # exact bitwise symmetry: keep the upper triangle
    iu = np.triu_indices_from(H, 1)
    H.T[iu] = H[iu]
    return H


def build_hamiltonian(basis: NormalModeBasis, E_J: float, phi_ext: float,
                      trunc: TruncationScheme = DEFAULT_TRUNCATION) -> np.ndarray:
    return HamiltonianBlocks(basis, E_J, trunc).matrix(phi_ext)


def build_decoupled(basis: NormalModeBasis, E_J: float, phi_ext: float,
                    trunc: TruncationScheme = DEFAULT_TRUNCATION) -> np.ndarray:
    return HamiltonianBlocks(basis, E_J, trunc).decoupled_matrix(phi_ext)


def qubit_hamiltonian(basis: NormalModeBasis, E_J: float, phi_ext: float, m0: int = 20) -> np.ndarray:
    return HamiltonianBlocks(basis, E_J, TruncationScheme(1, m0)).qubit_matrix(phi_ext)


def decoupled_qubit(basis: NormalModeBasis, E_J: float, phi_ext: float, m0: int = 20):
    """Eigenvalues ``eps_mu`` and eigenvectors of the decoupled qubit block."""
    return diagonalize(qubit_hamiltonian(basis, E_J, phi_ext, m0))


def diagonalize(H: np.ndarray, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a real symmetric matrix.

    Eigenvector signs are fixed so that the largest-magnitude component of
    each column is positive, which makes repeated runs bit-identical.

    Raises
    ------
    NumericalError
        If LAPACK fails to converge or the result violates the residual
        (1e-9 ||H||) or orthonormality (1e-10) bounds.
    """
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    try:
        E, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge for {H.shape[0]}x{H.shape[0]} matrix: {exc}") from exc
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    V = V * signs
    if check:
        norm = np.linalg.norm(H, 2) if H.size else 0.0
        resid = np.linalg.norm(H @ V - V * E, axis=0).max(initial=0.0)
        if resid > 1e-9 * max(norm, 1e-300):
            raise NumericalError(f"eigen-residual {resid:.3g} exceeds 1e-9 * ||H|| = {1e-9 * norm:.3g}")
        orth = np.abs(V.T @ V - np.eye(V.shape[1])).max(initial=0.0)
        if orth > 1e-10:
            raise NumericalError(f"eigenvectors not orthonormal (deviation {orth:.3g})")
    return E, V


def eigenvalues(H: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues only; cheaper than :func:`diagonalize` when vectors are not needed."""
    try:
        return np.linalg.eigvalsh(np.asarray(H, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge for {H.shape[0]}x{H.shape[0]} matrix: {exc}") from exc
