"""Dressed-normal-mode quantization of a fluxonium coupled to a readout resonator.

The linear part of the circuit is diagonalized exactly into two normal
modes; the Josephson cosine is then expanded in the product Fock basis of
those modes. Spectra, dispersive shifts, Kerr terms, a perturbative
cross-check, state-dependent scattering parameters and a parameter fit are
built on top.
"""

from .params import (
    CONSTANTS,
    CircuitParams,
    ConfigError,
    NumericalError,
    PhysicalConstants,
    dump_params,
    flux_to_phase,
    load_device,
    load_params,
    phase_to_flux,
)
from .normal_modes import (
    ApplicabilityReport,
    NormalModeBasis,
    check_applicability,
    solve_normal_modes,
)
from .oscillator import charge_matrix, cos_sin_matrices, laguerre, phase_matrix
from .hamiltonian import (
    DEFAULT_TRUNCATION,
    HamiltonianBlocks,
    TruncationScheme,
    build_decoupled,
    build_hamiltonian,
    diagonalize,
)
from .spectrum import (
    LabeledSpectrum,
    assign_labels,
    convergence_report,
    dispersive_shift,
    kerr,
    solve_spectrum,
    sweep,
    transitions,
)
from .perturbation import PerturbedSpectrum, perturbative_chi, perturbative_spectrum
from .oracle import bare_basis_oracle, compare_with_oracle
from .scattering import ImpedanceModel, PortConfig, scattering_matrix, scattering_sweep
from .fit import FitResult, SpectroscopyDataset, fit_params, ingest_csv, synthetic_dataset

__version__ = "0.1.0"
