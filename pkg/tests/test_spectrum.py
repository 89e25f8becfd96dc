import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dressedmodes.hamiltonian import HamiltonianBlocks, TruncationScheme
from dressedmodes.normal_modes import solve_normal_modes
from dressedmodes.spectrum import (
    assign_labels,
    convergence_report,
    dispersive_shift,
    kerr,
    parse_state,
    solve_spectrum,
    state_name,
    sweep,
    sweep_rows,
    transitions,
)

SMALL = TruncationScheme(3, 14)


def brute_force_cost(coupled, decoupled):
    flat = decoupled.ravel()
    return min(
        sum(abs(c - flat[j]) for c, j in zip(coupled, perm))
        for perm in itertools.permutations(range(flat.size), len(coupled))
    )


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6), st.lists(st.floats(-5, 5), min_size=6, max_size=6))
def test_matching_is_optimal(coupled, grid):
    coupled = np.sort(np.asarray(coupled))
    grid = np.asarray(grid).reshape(2, 3)
    labels = assign_labels(coupled, grid)
    assert len({tuple(l) for l in labels}) == len(coupled)
    cost = np.abs(coupled - grid[labels[:, 0], labels[:, 1]]).sum()
    assert cost == pytest.approx(brute_force_cost(coupled, grid), abs=1e-9)


def test_tie_breaks_toward_fewer_photons():
    grid = np.array([[0.0, 1.0], [1.0, 2.0]])  # (0,1) and (1,0) degenerate
    labels = assign_labels(np.array([0.0, 1.0]), grid)
    assert tuple(labels[1]) == (0, 1)


def test_weak_coupling_labels_are_nearest(device_a):
    p = device_a.replace(L_s=0.05)
    spec = solve_spectrum(p, 0.9, SMALL)
    flat = spec.decoupled.ravel()
    for e, (n, mu) in zip(spec.energies[:12], spec.labels[:12]):
        nearest = np.unravel_index(np.argmin(np.abs(flat - e)), spec.decoupled.shape)
        assert (n, mu) == tuple(nearest)


@pytest.mark.parametrize("n, mu, name", [(0, 0, "0g"), (1, 1, "1e"), (2, 2, "2f"), (0, 3, "0h"), (3, 4, "3i")])
def test_state_names(n, mu, name):
    assert state_name(n, mu) == name
    assert parse_state(name) == (n, mu)


def test_state_name_fallback():
    assert parse_state(state_name(1, 40)) == (1, 40)
    assert parse_state("2,7") == (2, 7)
    with pytest.raises(ValueError):
        parse_state("0gg")
    with pytest.raises(ValueError):
        parse_state("g")


def test_spectrum_structure(device_a):
    spec = solve_spectrum(device_a, math.pi)
    assert spec.energy(0, 0) == 0.0
    assert spec.flux_over_phi0 == pytest.approx(0.5)
    assert np.all(np.diff(spec.energies) >= 0)
    assert sorted(map(tuple, spec.labels)) == sorted(itertools.product(range(6), range(21)))
    t = transitions(spec, extra=[((0, 0), (0, 2))])
    assert t["f_ge"] == pytest.approx(1.246, abs=2e-3)
    assert t["f_01"] == pytest.approx(7.880, abs=2e-3)
    assert t["0g->0f"] == pytest.approx(spec.energy(0, 2))
    assert spec.eigvecs.shape == (126, 126)
    with pytest.raises(KeyError):
        spec.index(9, 0)


def test_chi_vanishes_without_coupling(device_a):
    spec = solve_spectrum(device_a.replace(L_s=0.0), 0.7, SMALL)
    assert abs(dispersive_shift(spec)) < 1e-12


def test_kerr_vanishes_without_junction(device_a):
    spec = solve_spectrum(device_a.replace(E_J=0.0), 0.7, SMALL)
    for mu in range(3):
        assert abs(kerr(spec, mu)) < 1e-12


def test_kerr_needs_two_photons(device_a):
    with pytest.raises(ValueError):
        kerr(solve_spectrum(device_a, 0.0, TruncationScheme(1, 10)))


def test_reusing_blocks_is_identical(device_a):
    blocks = HamiltonianBlocks(solve_normal_modes(device_a), device_a.E_J, SMALL)
    a = solve_spectrum(blocks, 1.1)
    b = solve_spectrum(device_a, 1.1, SMALL)
    assert np.array_equal(a.energies, b.energies) and np.array_equal(a.labels, b.labels)


def test_threaded_sweep_is_bit_identical(device_a):
    flux = np.linspace(0, 0.5, 9)
    serial = sweep(device_a, flux, SMALL, threads=1)
    pooled = sweep(device_a, flux, SMALL, threads=4)
    for s, p in zip(serial, pooled):
        assert np.array_equal(s.energies, p.energies) and np.array_equal(s.labels, p.labels)
    rows = sweep_rows(serial, n_levels=3)
    assert len(rows) == 27 and rows[0] == (0.0, 0, 0, 0.0)


def test_convergence_report_device_a(device_a):
    ladder = [TruncationScheme(5, 20), TruncationScheme(8, 30)]
    rep = convergence_report(device_a, math.pi, ladder)
    assert math.isnan(rep.rows[0][3])
    assert rep.rows[1][:3] == (8, 30, 279)
    # computed shift of the lowest six levels at half flux quantum
    assert rep.rows[1][3] == pytest.approx(3.58e-3, abs=0.05e-3)
    assert not rep.converged
    finer = convergence_report(device_a, math.pi, [TruncationScheme(8, 30), TruncationScheme(10, 40)])
    assert finer.converged


def test_convergence_flags_high_impedance_stress(device_a):
    # tiny qubit capacitance gives lambda4 * phi_zpf_Q near 5
    p = device_a.replace(C_q=0.147)
    assert solve_normal_modes(p).phi_zpf_Q == pytest.approx(5.0, rel=0.05)
    rep = convergence_report(p, 0.0, [TruncationScheme(3, 20), TruncationScheme(4, 30)])
    assert not rep.converged


def test_device_a_sweep_regression(device_a):
    from pathlib import Path

    from dressedmodes.fit import ingest_csv, model_values

    ref = ingest_csv((Path(__file__).parent / "data" / "deviceA_sweep_reference.csv").read_text())
    got = model_values(device_a, ref.flux, ref.observable)
    np.testing.assert_allclose(got, ref.value, rtol=1e-9, atol=1e-12)
