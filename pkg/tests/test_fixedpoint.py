import math

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from zenolike.errors import ContractViolation, NumericalFailure
from zenolike.fixedpoint import (ScanGrid, SearchConfig, analyze_points, brouwer_fixed_point, detector_sweep,
                                 fibonacci_sphere, fixed_point_residual, freeze_design, idealized_gap_from_eigensolver,
                                 idealized_slow_gap, refine_zeno_point, scaling_probe, zeno_gap,
                                 zeno_preserved_state, zeno_scan)
from zenolike.model import ModelParams, QubitState, cycle_channel, idealized_channel
from zenolike.qcore import I2
from zenolike.spectra import evolve_n, trace_distance_series

from conftest import random_params, random_state

EQ = (0.865, 15.13, 14.96)


def test_brouwer_examples(rng):
    fp = brouwer_fixed_point(idealized_channel(0.7, 0.3))
    assert np.max(np.abs(fp.rho - I2 / 2)) <= 1e-12
    for _ in range(50):
        p = random_params(rng)
        b = brouwer_fixed_point(cycle_channel(p, QubitState.ground())).bloch
        assert abs(b[0]) <= 1e-9 and abs(b[1]) <= 1e-9
        fp = brouwer_fixed_point(cycle_channel(p, QubitState.maximally_mixed()))
        assert np.max(np.abs(fp.rho - I2 / 2)) <= 1e-12


def test_brouwer_valid_and_invariant(rng):
    for _ in range(1000):
        m = cycle_channel(random_params(rng), random_state(rng))
        fp = brouwer_fixed_point(m)
        assert abs(np.trace(fp.rho) - 1) <= 1e-12
        assert np.linalg.eigvalsh(fp.rho)[0] >= -1e-12
        assert fixed_point_residual(m, fp) <= 1e-10


def test_brouwer_degenerate_eigenspace_tie_break():
    assert np.allclose(brouwer_fixed_point(np.eye(4)).rho, I2 / 2)
    # no coupling: every z-diagonal state is fixed; the projection of I/2 is I/2
    m = cycle_channel(ModelParams(0.0, 0.3, 0.2))
    assert np.allclose(brouwer_fixed_point(m).rho, I2 / 2)


def test_brouwer_rejects_non_channel():
    with pytest.raises(NumericalFailure):
        brouwer_fixed_point(0.5 * np.eye(4))


def test_grid_validation_and_parse():
    g = ScanGrid.parse("g=0.1:0.2:3, dtm=1:2:5")
    assert g.shape == (3, 100, 5)
    assert g.g == (0.1, 0.2, 3)
    for bad in ("g=0:1", "q=0:1:3", "g=a:1:3", "g=0:1:0", "dtf=-1:1:3"):
        with pytest.raises(ContractViolation):
            ScanGrid.parse(bad)
    with pytest.raises(ContractViolation):
        ScanGrid(detector=(1, 1, 0))


def test_grid_order_dtm_fastest():
    pts = ScanGrid(g=(0, 1, 2), dtf=(0, 1, 2), dtm=(0, 1, 3)).points()
    assert pts.shape == (12, 3)
    assert np.allclose(pts[:3, 2], [0, 0.5, 1]) and np.all(pts[:3, :2] == 0)
    assert np.allclose(pts[3], [0, 1, 0])


def test_scan_flags_reference_point():
    grid = ScanGrid(g=(EQ[0], EQ[0], 1), dtf=(EQ[1], EQ[1], 1), dtm=(EQ[2], EQ[2], 1))
    res = zeno_scan(grid, eps=0.02)
    assert res.flagged[0]
    rec = res.record(0)
    assert rec.flagged and rec.min_gap < 1e-4


def test_scan_matches_single_point_analysis(rng):
    grid = ScanGrid(g=(0.1, 2.0, 3), dtf=(0.5, 9, 4), dtm=(0.2, 7, 5), detector=(0.3, -0.4, 0.5))
    res = zeno_scan(grid, eps=1e-2)
    for k in rng.choice(len(res), 10, replace=False):
        rec = res.record(k)
        m = cycle_channel(rec.params, QubitState.from_bloch(np.array(rec.detector)))
        vals = np.linalg.eigvals(m)
        cost = np.abs(vals[:, None] - np.array(rec.eigenvalues)[None, :])
        rows, cols = linear_sum_assignment(cost)
        assert cost[rows, cols].max() <= 1e-10
        assert rec.min_gap == pytest.approx(zeno_gap(m), abs=1e-10)
        assert np.allclose(rec.fixed_point, brouwer_fixed_point(m).bloch, atol=1e-9)
        assert np.linalg.norm(rec.fixed_point) <= 1 + 1e-10


def test_scan_without_coupling():
    # populations are conserved at g = 0, so the population block always sits at 1;
    # the coherence eigenvalue exp(2i(dtf + dtm)) is near 1 only when dtf + dtm is near a multiple of pi
    res = zeno_scan(ScanGrid(g=(0, 0, 1), dtf=(0.1, 6, 30), dtm=(0.1, 6, 30)), eps=1e-2)
    assert res.flagged.all()
    phase = res.params[:, 1] + res.params[:, 2]
    lam = np.exp(2j * phase)
    coh = np.min(np.abs(res.eigenvalues[:, :, None] - np.stack([lam, lam.conj()], 1)[:, None, :]), axis=(1, 2))
    assert np.max(coh) <= 1e-12
    near = np.abs(lam - 1) <= 1e-2
    trivial = np.abs(np.sin(phase)) <= 1e-2
    assert np.array_equal(near, trivial & near)


def test_scan_deterministic_across_workers():
    grid = ScanGrid(g=(0.3, 1.5, 4), dtf=(1, 10, 10), dtm=(1, 10, 10))
    a = zeno_scan(grid, workers=1, chunk=64)
    b = zeno_scan(grid, workers=2, chunk=64)
    for name in ("params", "eigenvalues", "fixed_points", "min_gap", "defective"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_analyze_points_empty():
    res = analyze_points(np.zeros((0, 3)), np.zeros(3))
    assert len(res) == 0


def test_fibonacci_sphere():
    d = fibonacci_sphere(20)
    assert np.allclose(np.linalg.norm(d, axis=1), 1)
    assert np.allclose(d[0], [0, 0, 1]) and np.allclose(d[-1], [0, 0, -1])
    assert np.linalg.norm(d.mean(axis=0)) < 0.05


def test_detector_sweep():
    p = ModelParams(1.1, 2.3, 3.7)
    res = detector_sweep(p, n_dirs=16, n_radii=3)
    assert len(res) == 1 + 16 * 3
    assert np.allclose(res.fixed_points[0], 0, atol=1e-12)
    ground = 1 + 2 * 16
    assert np.allclose(res.detectors[ground], [0, 0, 1])
    assert np.max(np.abs(res.fixed_points[ground, :2])) <= 1e-9
    off_axis = np.linalg.norm(res.fixed_points[1:, :2], axis=1)
    assert off_axis.max() > 0.1


def test_refinement_reaches_zeno_point():
    ref = refine_zeno_point(ModelParams(*EQ))
    assert ref.converged and ref.gap <= 1e-8
    shift = np.abs(np.array(ref.params.as_tuple()) / np.array(EQ) - 1)
    assert shift.max() <= 0.01
    m = cycle_channel(ref.params)
    s = zeno_preserved_state(m)
    assert np.linalg.norm(s.bloch) == pytest.approx(1, abs=1e-6)
    assert fixed_point_residual(m, s) <= 1e-6
    assert np.allclose(s.bloch, [0.84, 0.54, 0], atol=0.02)


def test_preserved_state_requires_second_unit_eigenvalue():
    with pytest.raises(NumericalFailure):
        zeno_preserved_state(cycle_channel(ModelParams(1.0, 1.0, 1.0)))


def test_flagged_points_admit_preserved_states():
    grid = ScanGrid(g=(0.6, 1.2, 7), dtf=(13, 17, 21), dtm=(13, 17, 21))
    res = zeno_scan(grid, eps=1e-2)
    idx = res.flagged_indices[np.argsort(res.min_gap[res.flagged_indices], kind="stable")][:3]
    assert len(idx) > 0
    for k in idx:
        ref = refine_zeno_point(res.record(k).params)
        if not ref.converged:
            continue
        m = cycle_channel(ref.params)
        assert fixed_point_residual(m, zeno_preserved_state(m)) <= 1e-6


def test_design_maximally_mixed_first_probe():
    r = freeze_design(QubitState.maximally_mixed())
    assert r.evaluations == 1
    assert r.residual <= 1e-14 and r.converged
    assert np.allclose(r.detector.bloch, 0)


def test_design_ground_state_target():
    r = freeze_design(QubitState.ground())
    assert r.converged and r.residual <= 1e-6
    assert r.fixed_point_distance <= 1e-6


def test_design_pinned_ground_detector_reaches_z_axis():
    target = QubitState.from_bloch([0, 0, -0.4])
    r = freeze_design(target, SearchConfig(detector=(0.0, 0.0, 1.0)))
    assert r.converged and r.residual <= 1e-6
    assert np.allclose(r.detector.bloch, [0, 0, 1])


def test_design_preserved_state_seeded_near_reference():
    ref = refine_zeno_point(ModelParams(*EQ))
    target = zeno_preserved_state(cycle_channel(ref.params))
    x = np.array(EQ)
    cfg = SearchConfig(g_range=(0.99 * x[0], 1.01 * x[0]), dtf_range=(0.99 * x[1], 1.01 * x[1]),
                       dtm_range=(0.99 * x[2], 1.01 * x[2]), detector=(0.0, 0.0, 1.0), initial=(EQ,),
                       require_brouwer=False)
    r = freeze_design(target, cfg)
    assert r.converged and r.residual <= 1e-6
    assert np.max(np.abs(np.array(r.params.as_tuple()) / x - 1)) <= 0.01


def test_design_general_target_is_attracting():
    target = QubitState.from_bloch([0.3, -0.5, 0.4])
    r = freeze_design(target)
    assert r.converged and r.fixed_point_distance <= 1e-6
    m = cycle_channel(r.params, r.detector)
    if r.stable:
        traj = evolve_n(m, QubitState.from_bloch([-0.5, 0.5, -0.5]), 3000)
        assert trace_distance_series(traj, target)[-1] < trace_distance_series(traj, target)[0]


def test_design_not_converged_is_a_result():
    r = freeze_design(QubitState.from_bloch([0.9, 0, 0]), SearchConfig(budget=50, coarse_points=16, n_seeds=1))
    assert not r.converged
    assert r.residual >= 0


def test_slow_gap_closed_form_matches_eigensolver():
    for th in np.linspace(0.2, 1.5, 7):
        for ph in (1e-3, 0.05, 0.3):
            assert idealized_slow_gap(th, ph) == pytest.approx(idealized_gap_from_eigensolver(th, ph), rel=1e-6)


def test_scaling_probe_examples():
    dtf = np.logspace(-4, -2, 9)
    fit = scaling_probe(math.pi / 3, dtf)
    assert fit.exponent == pytest.approx(2.0, abs=0.02)
    assert fit.coefficient == pytest.approx(2 / math.tan(math.pi / 3) ** 2, rel=0.01)
    fit = scaling_probe(math.pi / 4, dtf)
    assert fit.coefficient == pytest.approx(2.0, rel=0.01)


def test_scaling_probe_right_angle_is_degenerate():
    # at theta = pi/2 the idealized map is a reflection and the slow eigenvalue is exactly 1
    fit = scaling_probe(math.pi / 2, np.logspace(-4, -2, 9))
    assert fit.degenerate and math.isnan(fit.exponent)


def test_scaling_probe_needs_a_decade():
    with pytest.raises(ContractViolation):
        scaling_probe(0.5, [1e-3, 5e-3])
