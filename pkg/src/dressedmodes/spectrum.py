"""Labeled spectra, derived observables and flux sweeps.

Coupled eigenvalues ``E`` receive quantum numbers ``(n, mu)`` from the
decoupled spectrum ``eps[n, mu] = n f_R + eps_mu`` through a minimum-cost
one-to-one matching on ``|E - eps|``. In the weak-coupling limit this is the
nearest-level rule; unlike that rule it cannot hand the same label to two
levels next to an anticrossing. Exact cost ties go to the smaller ``n``.
"""

from __future__ import annotations

import math
import string
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .hamiltonian import DEFAULT_TRUNCATION, HamiltonianBlocks, TruncationScheme, diagonalize, eigenvalues
from .normal_modes import NormalModeBasis, solve_normal_modes
from .params import CircuitParams, flux_to_phase, phase_to_flux

__all__ = [
    "LabeledSpectrum",
    "assign_labels",
    "solve_spectrum",
    "state_name",
    "parse_state",
    "transition",
    "transitions",
    "dispersive_shift",
    "kerr",
    "sweep",
    "sweep_rows",
    "ConvergenceReport",
    "convergence_report",
]

_QUBIT_LETTERS = "gefh" + "".join(c for c in string.ascii_lowercase[8:] if c not in "gefh")
_TIE_BREAK = 1e-12  # GHz per readout photon


def state_name(n: int, mu: int) -> str:
    """``(0, 0) -> "0g"``, ``(1, 1) -> "1e"``; qubit index past the letters -> ``"n,mu"``."""
    if mu < len(_QUBIT_LETTERS):
        return f"{n}{_QUBIT_LETTERS[mu]}"
    return f"{n},{mu}"


def parse_state(token: str) -> tuple[int, int]:
    """Inverse of :func:`state_name`; also accepts ``"n,mu"``."""
    token = token.strip()
    if "," in token:
        n, mu = token.split(",")
        return int(n), int(mu)
    digits = token.rstrip(string.ascii_lowercase)
    letter = token[len(digits):]
    if not digits or len(letter) != 1 or letter not in _QUBIT_LETTERS:
        raise ValueError(f"cannot parse state {token!r}; expected e.g. '0g' or '1,3'")
    return int(digits), _QUBIT_LETTERS.index(letter)


@dataclass
class LabeledSpectrum:
    """Coupled eigenvalues at one flux point with assigned quantum numbers.

    Attributes
    ----------
    phi_ext : float
        Reduced external flux in radians.
    energies : ndarray
        Ascending absolute energies in GHz.
    labels : ndarray of int, shape (N, 2)
        ``(n, mu)`` for each level.
    eigvecs : ndarray or None
        Columns are eigenvectors in the dressed ``|n m>`` basis.
    decoupled : ndarray, shape (n0 + 1, m0 + 1)
        The decoupled energies ``eps[n, mu]``.
    """

    phi_ext: float
    energies: np.ndarray
    labels: np.ndarray
    eigvecs: np.ndarray | None
    decoupled: np.ndarray
    trunc: TruncationScheme
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {(int(n), int(mu)): i for i, (n, mu) in enumerate(self.labels)}

    @property
    def flux_over_phi0(self) -> float:
        return phase_to_flux(self.phi_ext)

    def index(self, n: int, mu: int) -> int:
        try:
            return self._index[(n, mu)]
        except KeyError:
            raise KeyError(f"state {state_name(n, mu)} not in truncated spectrum {self.trunc}") from None

    def energy(self, n: int, mu: int, relative: bool = True) -> float:
        E = self.energies[self.index(n, mu)]
        return E - self.ground_energy if relative else E

    @property
    def ground_energy(self) -> float:
        return float(self.energies[self.index(0, 0)])

    @property
    def relative_energies(self) -> np.ndarray:
        return self.energies - self.ground_energy

    def levels(self, relative: bool = True) -> list[tuple[float, int, int]]:
        E = self.relative_energies if relative else self.energies
        return [(float(e), int(n), int(mu)) for e, (n, mu) in zip(E, self.labels)]

    @property
    def labeling_cost(self) -> float:
        """Total ``sum |E - eps|`` of the label assignment, in GHz."""
        return float(np.abs(self.energies - self.decoupled[self.labels[:, 0], self.labels[:, 1]]).sum())


def assign_labels(coupled: np.ndarray, decoupled: np.ndarray) -> np.ndarray:
    """Optimal one-to-one matching of coupled levels to decoupled ``(n, mu)`` labels.

    Parameters
    ----------
    coupled : ndarray, shape (N,)
    decoupled : ndarray, shape (n0 + 1, m0 + 1)
        Needs at least ``N`` entries.

    Returns
    -------
    ndarray of int, shape (N, 2)
    """
    coupled = np.asarray(coupled, dtype=float)
    decoupled = np.asarray(decoupled, dtype=float)
    flat = decoupled.ravel()
    assert flat.size >= coupled.size, "more coupled levels than decoupled labels"
    n_of = np.repeat(np.arange(decoupled.shape[0]), decoupled.shape[1])
    cost = np.abs(coupled[:, None] - flat[None, :]) + _TIE_BREAK * n_of[None, :]
    rows, cols = linear_sum_assignment(cost)
    labels = np.empty((coupled.size, 2), dtype=int)
    labels[rows] = np.column_stack(np.unravel_index(cols, decoupled.shape))
    return labels


def _decoupled_grid(blocks: HamiltonianBlocks, phi_ext: float) -> np.ndarray:
    eps = eigenvalues(blocks.qubit_matrix(phi_ext))
    return np.add.outer(blocks.basis.f_R * np.arange(blocks.trunc.n0 + 1), eps)


def solve_spectrum(
    system: CircuitParams | HamiltonianBlocks,
    phi_ext: float,
    trunc: TruncationScheme = DEFAULT_TRUNCATION,
    keep_vectors: bool = True,
) -> LabeledSpectrum:
    """Diagonalize the coupled and decoupled Hamiltonians and label the levels.

    ``system`` is either circuit parameters or prebuilt :class:`HamiltonianBlocks`
    (reuse the latter across many flux points).
    """
    blocks = system if isinstance(system, HamiltonianBlocks) else _blocks(system, trunc)
    H = blocks.matrix(phi_ext)
    E, V = diagonalize(H) if keep_vectors else (eigenvalues(H), None)
    grid = _decoupled_grid(blocks, phi_ext)
    return LabeledSpectrum(
        phi_ext=float(phi_ext),
        energies=E,
        labels=assign_labels(E, grid),
        eigvecs=V,
        decoupled=grid,
        trunc=blocks.trunc,
    )


def _blocks(params: CircuitParams, trunc: TruncationScheme) -> HamiltonianBlocks:
    return HamiltonianBlocks(solve_normal_modes(params), params.E_J, trunc)


def transition(spec: LabeledSpectrum, initial: tuple[int, int], final: tuple[int, int]) -> float:
    """``E_final - E_initial`` in GHz."""
    return spec.energy(*final, relative=False) - spec.energy(*initial, relative=False)


def transitions(spec: LabeledSpectrum, extra: Iterable[tuple[tuple[int, int], tuple[int, int]]] = ()) -> dict[str, float]:
    """Readout ``0->1`` (qubit in g) and qubit ``g->e`` (no photons) frequencies, plus any extras."""
    out = {
        "f_01": transition(spec, (0, 0), (1, 0)),
        "f_ge": transition(spec, (0, 0), (0, 1)),
    }
    for a, b in extra:
        out[f"{state_name(*a)}->{state_name(*b)}"] = transition(spec, a, b)
    return out


def dispersive_shift(spec: LabeledSpectrum) -> float:
    """chi = (E_1e - E_0e) - (E_1g - E_0g), in GHz."""
    return transition(spec, (0, 1), (1, 1)) - transition(spec, (0, 0), (1, 0))


def kerr(spec: LabeledSpectrum, mu: int = 0) -> float:
    """Readout anharmonicity inherited from the junction with the qubit in state ``mu``."""
    if spec.trunc.n0 < 2:
        raise ValueError("kerr needs n0 >= 2")
    return transition(spec, (1, mu), (2, mu)) - transition(spec, (0, mu), (1, mu))


def sweep(
    params: CircuitParams,
    flux_over_phi0: Sequence[float],
    trunc: TruncationScheme = DEFAULT_TRUNCATION,
    threads: int | None = None,
    keep_vectors: bool = False,
) -> list[LabeledSpectrum]:
    """Labeled spectra along a grid of ``Phi_ext / Phi_0`` values.

    The flux-independent blocks are built once; points are mapped over a
    thread pool of at most ``threads`` workers (LAPACK releases the GIL).
    """
    blocks = _blocks(params, trunc)
    phases = [flux_to_phase(float(x)) for x in flux_over_phi0]

    def one(p):
        return solve_spectrum(blocks, p, keep_vectors=keep_vectors)

    if threads == 1 or len(phases) < 2:
        return [one(p) for p in phases]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, phases))


def sweep_rows(spectra: Sequence[LabeledSpectrum], n_levels: int | None = None,
               relative: bool = True) -> list[tuple[float, int, int, float]]:
    """Rows ``(flux_over_phi0, n, mu, energy_GHz)`` for CSV output."""
    rows = []
    for spec in spectra:
        for e, n, mu in spec.levels(relative)[:n_levels]:
            rows.append((spec.flux_over_phi0, n, mu, e))
    return rows


@dataclass(frozen=True)
class ConvergenceReport:
    """Tracked-level energies along a truncation ladder.

    ``rows[i] = (n0, m0, dim, max_shift)`` where ``max_shift`` is the largest
    change of any tracked absolute level relative to the previous rung
    (``nan`` on the first rung).
    """

    rows: tuple[tuple[int, int, int, float], ...]
    energies: np.ndarray
    tol: float

    @property
    def converged(self) -> bool:
        return len(self.rows) > 1 and self.rows[-1][3] < self.tol


def convergence_report(
    params: CircuitParams,
    phi_ext: float,
    ladder: Sequence[TruncationScheme],
    n_levels: int = 6,
    tol: float = 1e-3,
) -> ConvergenceReport:
    """Track the lowest ``n_levels`` eigenvalues as the truncation grows.

    The ladder should be nested (non-decreasing cutoffs) so that eigenvalues
    are variationally non-increasing.
    """
    basis = solve_normal_modes(params)
    energies = []
    rows = []
    for trunc in ladder:
        E = eigenvalues(HamiltonianBlocks(basis, params.E_J, trunc).matrix(phi_ext))[:n_levels]
        shift = float(np.abs(E - energies[-1]).max()) if energies else math.nan
        energies.append(E)
        rows.append((trunc.n0, trunc.m0, trunc.dim, shift))
    return ConvergenceReport(tuple(rows), np.array(energies), tol)
