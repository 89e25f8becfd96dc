"""Second-order perturbative treatment of the readout-qubit coupling.

The cosine is expanded to second order in ``lambda3 phi_R``. The quadratic
term is taken to first order and the linear term to second order, on top of the
decoupled eigenstates ``|n>|mu>_0`` with energies ``n f_R + eps_mu``:

    d_eps[n, mu] = E_J x^2 (n + 1/2) <mu|cos theta|mu>
                 + E_J^2 x^2 sum_{mu' != mu} ((2n + 1) D + f_R) / (D^2 - f_R^2) |<mu'|sin theta|mu>|^2

with ``x = lambda3 phi_zpf_R``, ``D = eps_mu - eps_mu'`` and ``theta`` the
qubit-block Josephson phase. The ``mu' = mu`` term of the second-order sum is
excluded; it is independent of ``n`` and so drops out of ``chi``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .hamiltonian import HamiltonianBlocks, TruncationScheme, diagonalize
from .normal_modes import NormalModeBasis

__all__ = ["PerturbedSpectrum", "perturbative_spectrum", "perturbative_chi", "DIVERGENCE_THRESHOLD"]

DIVERGENCE_THRESHOLD = 1e-6  # GHz^2, i.e. (1 MHz)^2


@dataclass(frozen=True)
class PerturbedSpectrum:
    """Unperturbed energies and their corrections on an ``(n, mu)`` grid, in GHz.

    Attributes
    ----------
    eps : ndarray, shape (n_max + 1, m0 + 1)
        ``n f_R + eps_mu``.
    delta : ndarray, same shape
        Second-order corrections.
    divergent : tuple of (mu, mu') pairs
        Energy denominators with ``|D^2 - f_R^2|`` below the threshold.
    tail_ratio : ndarray, shape (m0 + 1,)
        Magnitude of the last (``mu' = m0``) term of the sum relative to the
        whole sum, per ``mu`` at ``n = 0``; a crude truncation diagnostic.
    """

    phi_ext: float
    eps: np.ndarray
    delta: np.ndarray
    divergent: tuple[tuple[int, int], ...]
    tail_ratio: np.ndarray
    m0: int

    @property
    def total(self) -> np.ndarray:
        return self.eps + self.delta

    def level(self, n: int, mu: int) -> float:
        return float(self.total[n, mu])

    def levels(self) -> list[tuple[int, int, float, float]]:
        return [
            (n, mu, float(self.eps[n, mu]), float(self.delta[n, mu]))
            for n in range(self.eps.shape[0])
            for mu in range(self.eps.shape[1])
        ]


def perturbative_spectrum(
    basis: NormalModeBasis,
    E_J: float,
    phi_ext: float,
    m0: int = 20,
    n_max: int = 2,
    absorb_lambda4: bool = True,
) -> PerturbedSpectrum:
    """Perturbed energies ``eps + delta`` for ``n <= n_max`` and ``mu <= m0``.

    Parameters
    ----------
    absorb_lambda4 : bool
        If True the qubit operators in the matrix elements carry ``lambda4``
        (as in the full Hamiltonian). If False they use ``phi_zpf_Q`` alone.
    """
    if abs(basis.lambda3) >= 1:
        raise ValueError(f"|lambda3| = {abs(basis.lambda3)} is not small")
    blocks = HamiltonianBlocks(basis, E_J, TruncationScheme(1, m0))
    eps_mu, U = diagonalize(blocks.qubit_matrix(phi_ext))
    if absorb_lambda4:
        cos_op, sin_op = blocks.qubit_operators(phi_ext)
    else:
        alt = HamiltonianBlocks(replace(basis, lambda4=1.0), E_J, TruncationScheme(1, m0))
        cos_op, sin_op = alt.qubit_operators(phi_ext)
    cos_d = np.diag(U.T @ cos_op @ U)
    sin2 = (U.T @ sin_op @ U) ** 2  # [mu', mu]

    fR = basis.f_R
    x2 = (basis.lambda3 * basis.phi_zpf_R) ** 2
    D = eps_mu[None, :] - eps_mu[:, None]  # D[mu', mu] = eps_mu - eps_mu'
    denom = D**2 - fR**2
    off = ~np.eye(m0 + 1, dtype=bool)
    divergent = tuple(
        (int(mu), int(mp)) for mp, mu in zip(*np.nonzero(off & (np.abs(denom) < DIVERGENCE_THRESHOLD)))
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(off, sin2 / denom, 0.0)
    # second-order sum split as (2n + 1) * A + B
    A = (w * D).sum(axis=0)
    B = fR * w.sum(axis=0)

    n = np.arange(n_max + 1)[:, None]
    delta = E_J * x2 * (n + 0.5) * cos_d[None, :] + E_J**2 * x2 * ((2 * n + 1) * A[None, :] + B[None, :])
    eps = n * fR + eps_mu[None, :]

    terms = w * (D + fR)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.abs(terms[-1]) / np.abs(terms.sum(axis=0))
    return PerturbedSpectrum(float(phi_ext), eps, delta, divergent, tail, m0)


def perturbative_chi(ps: PerturbedSpectrum) -> float:
    """Dispersive shift from the perturbed levels, in GHz."""
    return (ps.level(1, 1) - ps.level(0, 1)) - (ps.level(1, 0) - ps.level(0, 0))
