"""Command-line front end.

Every tabular output is CSV preceded by ``#`` comment lines holding the run
manifest (subcommand, resolved parameters, truncation, flux grid,
outputs, version). The pipeline is deterministic: the same manifest yields a
byte-identical file.

Exit codes: 0 success, 2 usage error, 3 invalid input (configuration, data
or file access), 4 numerical failure. Errors are reported on stderr as one
line ``dressedmodes: error: <category>: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .fit import fit_params, ingest_csv, model_values
from .hamiltonian import HamiltonianBlocks, TruncationScheme
from .normal_modes import check_applicability, solve_normal_modes
from .oracle import compare_with_oracle
from .params import CircuitParams, ConfigError, NumericalError, dump_params, flux_to_phase, load_device, load_params
from .perturbation import perturbative_chi, perturbative_spectrum
from .scattering import CSV_HEADER, DEFAULT_Q_Q, DEFAULT_Q_R, PortConfig, scattering_sweep
from .spectrum import (
    convergence_report,
    dispersive_shift,
    kerr,
    parse_state,
    solve_spectrum,
    state_name,
    sweep,
    sweep_rows,
)

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3, 4
PROG = "dressedmodes"


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    """Run record written as a comment header into every output file."""

    subcommand: str
    config: str
    params: CircuitParams
    trunc: TruncationScheme | None = None
    flux: str | None = None
    extra: dict = field(default_factory=dict)
    outputs: tuple[str, ...] = ()
    version: str = __version__

    def header(self) -> str:
        lines = [f"tool: {PROG} {self.version}", f"subcommand: {self.subcommand}", f"config: {self.config}"]
        lines += [f"param {k} = {v!r}" for k, v in self.params.as_dict().items()]
        if self.trunc is not None:
            lines.append(f"truncation: n0={self.trunc.n0} m0={self.trunc.m0}")
        if self.flux is not None:
            lines.append(f"flux_over_phi0: {self.flux}")
        lines += [f"{k}: {v}" for k, v in self.extra.items()]
        if self.outputs:
            lines.append("outputs: " + ", ".join(self.outputs))
        return "".join(f"# {ln}\n" for ln in lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ----------------------------------------------------------------------------- input helpers


def resolve_config(spec: str) -> CircuitParams:
    """A path to a config file, or a bundled device name (``deviceA``, ``B``...)."""
    path = Path(spec)
    if path.is_file():
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError("io", f"cannot read {spec}: {exc.strerror}") from None
        return load_params(text)
    try:
        return load_device(spec)
    except ConfigError:
        raise ConfigError("config not found", f"{spec!r} is neither a file nor a bundled device") from None


def parse_range(text: str, what: str = "range") -> np.ndarray:
    """``"a:b:n"`` -> ``n`` evenly spaced points from ``a`` to ``b`` inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"{what} must look like start:stop:points, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"{what} must look like start:stop:points, got {text!r}") from None
    if n < 1 or not (math.isfinite(a) and math.isfinite(b)):
        raise UsageError(f"{what} needs finite bounds and at least one point")
    return np.linspace(a, b, n)


def _flux_points(args) -> tuple[np.ndarray, str]:
    if args.flux_range is not None:
        return parse_range(args.flux_range, "--flux-range"), args.flux_range
    return np.array([args.flux]), repr(args.flux)


def _trunc(args) -> TruncationScheme:
    try:
        return TruncationScheme(args.n0, args.m0)
    except ValueError as exc:
        raise ConfigError("truncation", str(exc)) from None


def _csv_text(manifest: RunManifest, header, rows) -> str:
    buf = io.StringIO()
    buf.write(manifest.header())
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _write(path: str | None, text: str, out) -> None:
    if path is None:
        out.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ConfigError("io", f"cannot write {path}: {exc.strerror}") from None


def _emit_table(args, manifest: RunManifest, header, rows, out) -> None:
    if args.output is not None:
        manifest.outputs = (args.output,)
    _write(args.output, _csv_text(manifest, header, rows), out)


# ----------------------------------------------------------------------------- subcommands


def cmd_normal_modes(args, params, out):
    basis = solve_normal_modes(params)
    table = basis.as_dict()
    table["L_s/L_r"] = params.L_s / params.L_r
    for k, v in table.items():
        out.write(f"{k} = {v:.6g}\n")
    if args.output:
        m = RunManifest("normal-modes", args.config, params, outputs=(args.output,))
        _write(args.output, _csv_text(m, ("key", "value"), [(k, float(v)) for k, v in table.items()]), out)


def cmd_check(args, params, out):
    report = check_applicability(params, solve_normal_modes(params))
    for k, v in report.as_dict().items():
        out.write(f"{k} = {v:.6g}\n" if isinstance(v, float) else f"{k} = {str(v).lower()}\n")
    for msg in report.messages:
        out.write(f"warning: {msg}\n")


def cmd_spectrum(args, params, out):
    trunc = _trunc(args)
    spec = solve_spectrum(params, flux_to_phase(args.flux), trunc, keep_vectors=False)
    m = RunManifest("spectrum", args.config, params, trunc, repr(args.flux), {"levels": args.levels})
    _emit_table(args, m, ("flux_over_phi0", "n", "mu", "energy_GHz"), sweep_rows([spec], args.levels), out)


def cmd_sweep(args, params, out):
    if args.flux_range is None:
        raise UsageError("sweep requires --flux-range start:stop:points")
    trunc = _trunc(args)
    flux, fspec = _flux_points(args)
    spectra = sweep(params, flux, trunc, threads=args.threads)
    m = RunManifest("sweep", args.config, params, trunc, fspec, {"levels": args.levels})
    _emit_table(args, m, ("flux_over_phi0", "n", "mu", "energy_GHz"), sweep_rows(spectra, args.levels), out)


def _chi_values(args, params, flux, trunc):
    if args.method == "exact":
        return [dispersive_shift(s) for s in sweep(params, flux, trunc, threads=args.threads)]
    basis = solve_normal_modes(params)
    return [perturbative_chi(perturbative_spectrum(basis, params.E_J, flux_to_phase(x), trunc.m0)) for x in flux]


def cmd_chi(args, params, out):
    trunc = _trunc(args)
    flux, fspec = _flux_points(args)
    chi = _chi_values(args, params, flux, trunc)
    if args.flux_range is None and args.output is None:
        out.write(f"chi_GHz = {chi[0]:.6g}\n")
        return
    m = RunManifest("chi", args.config, params, trunc, fspec, {"method": args.method})
    _emit_table(args, m, ("flux_over_phi0", "chi_GHz"), [(float(x), float(c)) for x, c in zip(flux, chi)], out)


def cmd_kerr(args, params, out):
    trunc = _trunc(args)
    flux, fspec = _flux_points(args)
    mus = [parse_state("0" + s.strip())[1] for s in args.qubit_states.split(",")]
    spectra = sweep(params, flux, trunc, threads=args.threads)
    rows = [(float(x), state_name(0, mu)[1:], float(kerr(s, mu))) for x, s in zip(flux, spectra) for mu in mus]
    if args.flux_range is None and args.output is None:
        for _, q, k in rows:
            out.write(f"kerr_{q}_GHz = {k:.6g}\n")
        return
    m = RunManifest("kerr", args.config, params, trunc, fspec)
    _emit_table(args, m, ("flux_over_phi0", "qubit_state", "kerr_GHz"), rows, out)


def cmd_convergence(args, params, out):
    ladder = []
    for item in args.ladder.split(","):
        try:
            n0, m0 = (int(v) for v in item.split(":"))
        except ValueError:
            raise UsageError(f"--ladder entries must look like n0:m0, got {item!r}") from None
        ladder.append(TruncationScheme(n0, m0))
    rep = convergence_report(params, flux_to_phase(args.flux), ladder, args.levels, args.tol)
    m = RunManifest("convergence", args.config, params, None, repr(args.flux),
                    {"ladder": args.ladder, "levels": args.levels, "tol_GHz": args.tol,
                     "converged": str(rep.converged).lower()})
    _emit_table(args, m, ("n0", "m0", "dim", "max_shift_GHz"), rep.rows, out)


def cmd_oracle_check(args, params, out):
    rows = []
    flux, fspec = _flux_points(args)
    for x in flux:
        cmp_ = compare_with_oracle(params, flux_to_phase(float(x)), n_levels=args.levels)
        rows.append((float(x), cmp_.dressed_trunc.n0, cmp_.dressed_trunc.m0, cmp_.bare_trunc.n0,
                     cmp_.bare_trunc.m0, cmp_.max_deviation))
    m = RunManifest("oracle-check", args.config, params, None, fspec, {"levels": args.levels})
    _emit_table(args, m, ("flux_over_phi0", "dressed_n0", "dressed_m0", "bare_n0", "bare_m0", "max_dev_GHz"),
                rows, out)


def cmd_scattering(args, params, out):
    if args.freq_range is None:
        raise UsageError("scattering requires --freq-range start:stop:points (GHz)")
    freqs = parse_range(args.freq_range, "--freq-range")
    trunc = _trunc(args)
    basis = solve_normal_modes(params)
    states = [s.strip() for s in args.state.split(",")]
    for s in states:
        try:
            parse_state(s)
        except ValueError as exc:
            raise ConfigError("state", str(exc)) from None
    spec = solve_spectrum(HamiltonianBlocks(basis, params.E_J, trunc), flux_to_phase(args.flux))
    try:
        ports = PortConfig.from_basis(basis, args.qr, args.qq)
    except ValueError as exc:
        raise ConfigError("ports", str(exc)) from None
    results = scattering_sweep(spec, basis, ports, states, freqs, args.normalization)
    rows = [r for res in results for r in res.rows()]
    m = RunManifest("scattering", args.config, params, trunc, repr(args.flux),
                    {"states": ",".join(states), "freq_range_GHz": args.freq_range, "Q_R": args.qr, "Q_Q": args.qq,
                     "normalization": args.normalization})
    _emit_table(args, m, CSV_HEADER, rows, out)


def cmd_fit(args, params, out):
    try:
        text = Path(args.data).read_text()
    except OSError as exc:
        raise ConfigError("io", f"cannot read {args.data}: {exc.strerror}") from None
    data = ingest_csv(text)
    fixed = tuple(s.strip() for s in args.fix.split(",") if s.strip())
    trunc = _trunc(args)
    res = fit_params(data, params, fixed=fixed, trunc=trunc, maxiter=args.maxiter, threads=args.threads)
    out.write(f"converged = {str(res.converged).lower()}\n")
    out.write(f"message = {res.message}\n")
    out.write(f"iterations = {res.n_iter}\nevaluations = {res.n_eval}\n")
    out.write(f"residual = {res.residual!r}\n")
    for k, v in res.rms.items():
        out.write(f"rms_{k}_GHz = {v!r}\n")
    out.write(f"fixed = {','.join(res.fixed)}\n")
    for k, v in res.params.as_dict().items():
        out.write(f"{k} = {v!r}\n")
    out.write(f"L_s/L_r = {res.params.L_s / res.params.L_r!r}\n")
    m = RunManifest("fit", args.config, params, trunc, None,
                    {"data": args.data, "fixed": ",".join(fixed), "converged": str(res.converged).lower(),
                     "residual": repr(res.residual)})
    if args.output:
        m.outputs = (args.output,)
        _write(args.output, m.header() + dump_params(res.params), out)
    if args.overlay:
        m.outputs = (args.overlay,)
        model = model_values(res.params, data.flux, data.observable, trunc, args.threads)
        rows = [(float(x), o, float(v), float(s), float(mv))
                for x, o, v, s, mv in zip(data.flux, data.observable, data.value, data.sigma, model)]
        _write(args.overlay, _csv_text(m, ("flux", "observable", "value_GHz", "sigma_GHz", "model_GHz"), rows), out)


# ----------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", default="deviceA", help="config file path or bundled device (deviceA, deviceB)")
    common.add_argument("--n0", type=int, default=5, help="readout Fock cutoff")
    common.add_argument("--m0", type=int, default=20, help="qubit Fock cutoff")
    common.add_argument("--flux", type=float, default=0.5, help="external flux in units of Phi_0")
    common.add_argument("--flux-range", default=None, help="flux sweep start:stop:points (Phi_0)")
    common.add_argument("--output", default=None, help="output file (stdout if omitted)")
    common.add_argument("--threads", type=int, default=None, help="cap on parallel workers")

    parser = _Parser(prog=PROG, description="Dressed-normal-mode circuit quantization.")
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    add("normal-modes", cmd_normal_modes, "normal-mode coefficients and mode parameters")
    add("check", cmd_check, "applicability diagnostics")
    p = add("spectrum", cmd_spectrum, "labeled levels at one flux point")
    p.add_argument("--levels", type=int, default=None, help="number of lowest levels to report")
    p = add("sweep", cmd_sweep, "labeled levels along a flux sweep")
    p.add_argument("--levels", type=int, default=None)
    p = add("chi", cmd_chi, "dispersive shift")
    p.add_argument("--method", choices=("exact", "perturbative"), default="exact")
    p = add("kerr", cmd_kerr, "readout self-Kerr per qubit state")
    p.add_argument("--qubit-states", default="g,e", help="comma-separated qubit letters")
    p = add("convergence", cmd_convergence, "level shifts along a truncation ladder")
    p.add_argument("--ladder", default="5:20,6:24,8:30", help="comma-separated n0:m0 rungs")
    p.add_argument("--levels", type=int, default=6)
    p.add_argument("--tol", type=float, default=1e-3, help="convergence tolerance in GHz")
    p = add("oracle-check", cmd_oracle_check, "dressed vs bare-basis spectra")
    p.add_argument("--levels", type=int, default=10)
    p = add("scattering", cmd_scattering, "state-dependent two-port S parameters")
    p.add_argument("--state", default="0g", help="prepared state(s), e.g. 0g or 0g,0e")
    p.add_argument("--freq-range", default=None, help="probe grid start:stop:points (GHz)")
    p.add_argument("--qr", type=float, default=DEFAULT_Q_R, help="readout port quality factor")
    p.add_argument("--qq", type=float, default=DEFAULT_Q_Q, help="qubit port quality factor")
    p.add_argument("--normalization", choices=("power", "voltage"), default="power")
    p = add("fit", cmd_fit, "fit circuit parameters to spectroscopy data")
    p.add_argument("--data", required=True, help="CSV with flux,observable,value_GHz,sigma_GHz")
    p.add_argument("--init", dest="config", help="initial parameters (alias of --config)")
    p.add_argument("--fix", default="C_r", help="comma-separated parameters held fixed")
    p.add_argument("--overlay", default=None, help="CSV of measured vs modeled values")
    p.add_argument("--maxiter", type=int, default=3000)
    return parser


def _fail(code: int, category: str, message: str, err) -> int:
    message = " ".join(str(message).split())
    err.write(f"{PROG}: error: {category}: {message}\n")
    return code


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    if not argv:
        parser.print_help(err)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        if args.threads is not None and args.threads < 1:
            raise UsageError("--threads must be >= 1")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            params = resolve_config(args.config)
        for w in caught:
            err.write(f"{PROG}: warning: {w.message}\n")
        args.func(args, params, out)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", exc, err)
    except ConfigError as exc:
        return _fail(EXIT_VALIDATION, "validation", exc, err)
    except (NumericalError, np.linalg.LinAlgError, RuntimeError) as exc:
        return _fail(EXIT_NUMERICAL, "numerical", exc, err)
    except ValueError as exc:
        return _fail(EXIT_VALIDATION, "validation", exc, err)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
