"""Least-squares recovery of circuit parameters from spectroscopy data.

The forward model is exact diagonalization with labeled levels. Free
parameters are searched with a bounded Nelder-Mead simplex (standard
reflection/expansion/contraction/shrink coefficients 1, 2, 0.5, 0.5) in the
log-ratio coordinates ``u = log(p / p_initial)``, each confined to
``[log 0.2, log 5]``. Simplex methods tolerate the kinks that label swaps at
anticrossings put into the objective.

Dataset CSV format (lines starting with ``#`` are ignored)::

    flux,observable,value_GHz,sigma_GHz
    0.5,f_ge,1.2462,0.0062
    0.5,f_01,7.8800,0.0394
    0.5,chi,0.0601,0.0003

``flux`` is ``Phi_ext / Phi_0``; ``observable`` is one of ``f_ge``, ``f_01``, ``chi``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .hamiltonian import DEFAULT_TRUNCATION, TruncationScheme
from .params import CircuitParams, ConfigError
from .spectrum import dispersive_shift, sweep, transitions

__all__ = [
    "OBSERVABLES",
    "SpectroscopyDataset",
    "ingest_csv",
    "dataset_to_csv",
    "model_values",
    "objective",
    "synthetic_dataset",
    "FitResult",
    "fit_params",
]

OBSERVABLES = ("f_ge", "f_01", "chi")
CHI_RESIDUAL_CAP = 5.0
PARAM_NAMES = ("C_r", "L_r", "C_q", "L_q", "E_J", "L_s")
BOUNDS = (0.2, 5.0)


@dataclass(frozen=True)
class SpectroscopyDataset:
    flux: np.ndarray
    observable: tuple[str, ...]
    value: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        n = len(self.observable)
        if not (self.flux.shape == self.value.shape == self.sigma.shape == (n,)):
            raise ConfigError("shape", "dataset columns differ in length")
        if np.any(~np.isfinite(self.flux)) or np.any(~np.isfinite(self.value)):
            raise ConfigError("malformed number", "non-finite flux or value")
        if np.any(~(self.sigma > 0)):
            raise ConfigError("non-positive value", "sigma must be > 0")
        bad = set(self.observable) - set(OBSERVABLES)
        if bad:
            raise ConfigError("unknown observable", ", ".join(sorted(bad)))

    def __len__(self) -> int:
        return len(self.observable)

    @property
    def observables_present(self) -> tuple[str, ...]:
        return tuple(o for o in OBSERVABLES if o in self.observable)

    def subset(self, mask) -> "SpectroscopyDataset":
        mask = np.asarray(mask)
        return SpectroscopyDataset(
            self.flux[mask], tuple(np.asarray(self.observable)[mask]), self.value[mask], self.sigma[mask]
        )


def ingest_csv(text: str) -> SpectroscopyDataset:
    """Parse and validate a dataset; rows come back sorted by flux (stable)."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.reader(lines)
    header = [h.strip() for h in next(reader, [])]
    if header != ["flux", "observable", "value_GHz", "sigma_GHz"]:
        raise ConfigError("bad header", f"expected flux,observable,value_GHz,sigma_GHz, got {','.join(header)}")
    flux, obs, val, sig = [], [], [], []
    for lineno, row in enumerate(reader, 2):
        if len(row) != 4:
            raise ConfigError("syntax", f"row {lineno}: expected 4 fields, got {len(row)}")
        tag = row[1].strip()
        if tag not in OBSERVABLES:
            raise ConfigError("unknown observable", f"row {lineno}: {tag!r}")
        try:
            x, v, s = float(row[0]), float(row[2]), float(row[3])
        except ValueError:
            raise ConfigError("malformed number", f"row {lineno}: {row}") from None
        flux.append(x)
        obs.append(tag)
        val.append(v)
        sig.append(s)
    order = np.argsort(flux, kind="stable")
    return SpectroscopyDataset(
        np.asarray(flux)[order], tuple(obs[i] for i in order), np.asarray(val)[order], np.asarray(sig)[order]
    )


def dataset_to_csv(data: SpectroscopyDataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["flux", "observable", "value_GHz", "sigma_GHz"])
    for row in zip(data.flux, data.observable, data.value, data.sigma):
        w.writerow([repr(float(row[0])), row[1], repr(float(row[2])), repr(float(row[3]))])
    return buf.getvalue()


def model_values(params: CircuitParams, flux, observable, trunc: TruncationScheme = DEFAULT_TRUNCATION,
                 threads: int | None = None) -> np.ndarray:
    """Model prediction for each (flux, observable) row, in GHz."""
    flux = np.asarray(flux, dtype=float)
    unique = np.unique(flux)
    spectra = dict(zip(unique.tolist(), sweep(params, unique, trunc, threads=threads)))
    cache = {}
    out = np.empty(flux.size)
    for i, (x, tag) in enumerate(zip(flux.tolist(), observable)):
        if x not in cache:
            spec = spectra[x]
            cache[x] = {**transitions(spec), "chi": dispersive_shift(spec)}
        out[i] = cache[x][tag]
    return out


def _residuals(model: np.ndarray, data: SpectroscopyDataset) -> np.ndarray:
    r = (model - data.value) / data.sigma
    is_chi = np.array([o == "chi" for o in data.observable])
    r[is_chi] = np.clip(r[is_chi], -CHI_RESIDUAL_CAP, CHI_RESIDUAL_CAP)
    return r


def objective(params: CircuitParams, data: SpectroscopyDataset, trunc: TruncationScheme = DEFAULT_TRUNCATION,
              threads: int | None = None) -> float:
    """Weighted sum of squared residuals; chi residuals are capped at 5 sigma."""
    r = _residuals(model_values(params, data.flux, data.observable, trunc, threads), data)
    return float(np.dot(r, r))


def synthetic_dataset(
    params: CircuitParams,
    flux,
    noise: float = 0.005,
    seed: int | None = 0,
    observables=OBSERVABLES,
    sigma_floor: float = 1e-4,
    trunc: TruncationScheme = DEFAULT_TRUNCATION,
) -> SpectroscopyDataset:
    """Forward-model data with multiplicative Gaussian noise.

    Each value is multiplied by ``1 + noise * N(0, 1)``; the quoted sigma is
    ``max(noise * |value|, sigma_floor)`` so rows with near-zero ``chi`` do not
    get unbounded weight.
    """
    rng = np.random.default_rng(seed)
    flux = np.repeat(np.asarray(flux, dtype=float), len(observables))
    obs = tuple(observables) * (flux.size // len(observables))
    exact = model_values(params, flux, obs, trunc)
    value = exact * (1 + noise * rng.standard_normal(exact.size))
    sigma = np.maximum(noise * np.abs(exact), sigma_floor)
    return SpectroscopyDataset(flux, obs, value, sigma)


@dataclass
class FitResult:
    """Outcome of :func:`fit_params`.

    ``history`` holds the best objective value after each simplex iteration
    and is non-increasing by construction.
    """

    params: CircuitParams
    residual: float
    rms: dict[str, float]
    n_iter: int
    n_eval: int
    fixed: tuple[str, ...]
    converged: bool
    message: str
    history: list[float] = field(default_factory=list)


def _rms(params, data, trunc, threads) -> dict[str, float]:
    model = model_values(params, data.flux, data.observable, trunc, threads)
    out = {}
    for tag in data.observables_present:
        m = np.array([o == tag for o in data.observable])
        out[tag] = float(np.sqrt(np.mean((model[m] - data.value[m]) ** 2)))
    return out


def fit_params(
    data: SpectroscopyDataset,
    initial: CircuitParams,
    fixed=("C_r",),
    trunc: TruncationScheme = DEFAULT_TRUNCATION,
    maxiter: int = 3000,
    initial_step: float = 0.1,
    xatol: float = 1e-6,
    fatol: float = 1e-8,
    stall_window: int = 50,
    stall_rtol: float = 1e-10,
    threads: int | None = None,
) -> FitResult:
    """Fit the non-fixed circuit parameters to ``data``.

    Parameters
    ----------
    fixed : iterable of str
        Parameter names held at their initial values (bit-identical in the result).
    initial_step : float
        Size of the starting simplex in log-ratio units.

    Notes
    -----
    If the best objective improves by less than ``stall_rtol`` (relative)
    over ``stall_window`` iterations the search stops early and returns the
    best point with ``converged=False``.
    """
    fixed = tuple(fixed)
    unknown = set(fixed) - set(PARAM_NAMES)
    if unknown:
        raise ConfigError("unknown key", ", ".join(sorted(unknown)))
    free = [k for k in PARAM_NAMES if k not in fixed]
    base = initial.as_dict()

    def to_params(u):
        d = dict(base)
        for k, ui in zip(free, u):
            d[k] = base[k] * math.exp(ui)
        return CircuitParams(**d)

    def f(u):
        return objective(to_params(u), data, trunc, threads)

    if not free:
        res = f(np.zeros(0))
        return FitResult(initial, res, _rms(initial, data, trunc, threads), 0, 1, fixed, True,
                         "all parameters fixed", [res])

    nfree = len(free)
    simplex = np.vstack([np.zeros(nfree), initial_step * np.eye(nfree)])
    lo, hi = math.log(BOUNDS[0]), math.log(BOUNDS[1])
    history: list[float] = []
    stalled = False

    def callback(intermediate_result):
        nonlocal stalled
        history.append(float(intermediate_result.fun))
        if len(history) > stall_window:
            old = history[-stall_window - 1]
            if old > 0 and (old - history[-1]) / old < stall_rtol:
                stalled = True
                raise StopIteration

    res = minimize(
        f,
        np.zeros(nfree),
        method="Nelder-Mead",
        bounds=[(lo, hi)] * nfree,
        callback=callback,
        options={"initial_simplex": simplex, "maxiter": maxiter, "xatol": xatol, "fatol": fatol,
                 "adaptive": False},
    )
    best = to_params(res.x)
    converged = bool(res.success) and not stalled
    message = "stalled: no relative improvement over the stall window" if stalled else str(res.message)
    return FitResult(best, float(res.fun), _rms(best, data, trunc, threads), int(res.nit), int(res.nfev),
                     fixed, converged, message, history)
