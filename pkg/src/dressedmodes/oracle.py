"""Reference diagonalization in the bare oscillator basis ``{Phi_r, Phi_q}``.

Used as an independent check on the dressed-basis results. The bare modes
are the readout LC (``C_r``, ``L_r + L_s``) and the qubit LC (``C_q``, ``L_q``)
coupled by the mutual term ``-L_s / (L_q (L_r + L_s)) Phi_r Phi_q`` plus the
junction ``-E_J cos(phi_q - phi_ext)`` on the bare qubit phase. Nothing from
the normal-mode transformation is reused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .hamiltonian import HamiltonianBlocks, TruncationScheme
from .normal_modes import solve_normal_modes
from .oscillator import cos_sin_matrices
from .params import CONSTANTS, CircuitParams

__all__ = [
    "bare_hamiltonian",
    "bare_basis_oracle",
    "dressed_levels",
    "converged_levels",
    "minimal_converged_dimension",
    "OracleComparison",
    "compare_with_oracle",
]


def bare_hamiltonian(params: CircuitParams, phi_ext: float, trunc: TruncationScheme) -> np.ndarray:
    si = params.si
    L_rr = si["L_r"] + si["L_s"]
    h, hbar = CONSTANTS.planck, CONSTANTS.hbar
    f_r = 1 / math.sqrt(L_rr * si["C_r"]) / (2 * math.pi) / 1e9
    f_q = 1 / math.sqrt(si["L_q"] * si["C_q"]) / (2 * math.pi) / 1e9
    Z_r = math.sqrt(L_rr / si["C_r"])
    Z_q = math.sqrt(si["L_q"] / si["C_q"])
    # zero-point fluxes in Wb; coupling energy converted to GHz
    flux_r = math.sqrt(hbar * Z_r / 2)
    flux_q = math.sqrt(hbar * Z_q / 2)
    g = -si["L_s"] / (si["L_q"] * L_rr) * flux_r * flux_q / h / 1e9
    phi_zpf_q = math.sqrt(Z_q / (2 * CONSTANTS.impedance_quantum))

    nr, nq = trunc.n0 + 1, trunc.m0 + 1
    x_r = np.diag(np.sqrt(np.arange(1, nr)), 1)
    x_r = x_r + x_r.T
    x_q = np.diag(np.sqrt(np.arange(1, nq)), 1)
    x_q = x_q + x_q.T
    C, S = cos_sin_matrices(phi_zpf_q, nq)
    # cos(phi_q - p) = cos(phi_q) cos(p) + sin(phi_q) sin(p); the true sine is -S
    junction = math.cos(phi_ext) * C - math.sin(phi_ext) * S
    H = g * np.kron(x_r, x_q) - params.E_J * np.kron(np.eye(nr), junction)
    H[np.diag_indices_from(H)] += np.add.outer(f_r * np.arange(nr), f_q * np.arange(nq)).ravel()
    return H


def bare_basis_oracle(params: CircuitParams, phi_ext: float,
                      trunc: TruncationScheme = TruncationScheme(20, 50)) -> np.ndarray:
    """Ascending eigenvalues (GHz, zero-point energy dropped) in the bare basis."""
    return np.linalg.eigvalsh(bare_hamiltonian(params, phi_ext, trunc))


def dressed_levels(params: CircuitParams, phi_ext: float, trunc: TruncationScheme) -> np.ndarray:
    basis = solve_normal_modes(params)
    return np.linalg.eigvalsh(HamiltonianBlocks(basis, params.E_J, trunc).matrix(phi_ext))


Solver = Callable[[CircuitParams, float, TruncationScheme], np.ndarray]


def _relative(E: np.ndarray, n_levels: int) -> np.ndarray:
    return E[:n_levels] - E[0]


def converged_levels(
    solver: Solver,
    params: CircuitParams,
    phi_ext: float,
    start: TruncationScheme,
    step: tuple[int, int] = (2, 6),
    tol: float = 1e-4,
    n_levels: int = 10,
    max_rungs: int = 12,
) -> tuple[np.ndarray, TruncationScheme]:
    """Grow the truncation until the lowest levels (relative to ground) change by < ``tol`` GHz.

    Returns the converged relative levels and the truncation that produced them.
    """
    trunc = start
    prev = _relative(solver(params, phi_ext, trunc), n_levels)
    for _ in range(max_rungs):
        nxt = TruncationScheme(trunc.n0 + step[0], trunc.m0 + step[1])
        cur = _relative(solver(params, phi_ext, nxt), n_levels)
        if np.abs(cur - prev).max() < tol:
            return cur, nxt
        trunc, prev = nxt, cur
    raise RuntimeError(f"no convergence to {tol} GHz up to truncation {trunc}")


def minimal_converged_dimension(
    solver: Solver,
    params: CircuitParams,
    phases: Sequence[float],
    references: Sequence[np.ndarray],
    tol: float = 1e-3,
    n0_range: Sequence[int] = range(1, 9),
    m0_range: Sequence[int] = range(10, 61),
    n_levels: int = 10,
) -> tuple[int, TruncationScheme]:
    """Smallest total dimension whose lowest levels match ``references`` to ``tol`` at every phase.

    Scans the full ``(n0, m0)`` grid; ties in dimension go to the smaller ``n0``.
    """
    best = None
    for n0 in n0_range:
        for m0 in m0_range:
            trunc = TruncationScheme(n0, m0)
            if best is not None and trunc.dim >= best[0]:
                break
            ok = all(
                np.abs(_relative(solver(params, p, trunc), n_levels) - ref).max() <= tol
                for p, ref in zip(phases, references)
            )
            if ok:
                best = (trunc.dim, trunc)
                break
    if best is None:
        raise RuntimeError("no truncation in the scanned grid reached the tolerance")
    return best


@dataclass(frozen=True)
class OracleComparison:
    phi_ext: float
    dressed: np.ndarray
    bare: np.ndarray
    dressed_trunc: TruncationScheme
    bare_trunc: TruncationScheme

    @property
    def max_deviation(self) -> float:
        """Largest |dressed - bare| over the compared levels, in GHz."""
        return float(np.abs(self.dressed - self.bare).max())


def compare_with_oracle(params: CircuitParams, phi_ext: float, n_levels: int = 10,
                        tol: float = 1e-4) -> OracleComparison:
    """Dressed vs bare spectra (relative to ground), each at demonstrated convergence."""
    d, td = converged_levels(dressed_levels, params, phi_ext, TruncationScheme(4, 30), tol=tol, n_levels=n_levels)
    b, tb = converged_levels(bare_basis_oracle, params, phi_ext, TruncationScheme(8, 30), tol=tol, n_levels=n_levels)
    return OracleComparison(phi_ext, d, b, td, tb)
