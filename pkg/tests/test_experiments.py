"""Sweep-layer tests. The rectangular-drive sweeps have full closed-form
oracles (both channels solvable), which checks the entire stack from
model construction through sweep bookkeeping; the soft-pulse claims are
bounded by the physics they regenerate."""

import math

import numpy as np
import pytest

from rydgate.analytic import c11_rect
from rydgate.experiments import (
    SweepSpec,
    cesium_example,
    fidelity_trajectory,
    grid,
    resolve_workers,
    run_sweep,
    sweep_decay,
    sweep_detuning,
    sweep_ratio,
    sweep_relative_error,
)
from rydgate.gate import GateConfig, bell_fidelity, run_gate
from rydgate.model import GaussianPulse, RectangularPulse, SystemParams, magic_ratio


def rect_ratio_fidelity(r):
    """Closed form for the rectangular gate at ratio r on its own
    full-cycle window: the Rabi channel lands exactly on -1, the photon
    channel on its three-level return amplitude."""
    c11 = c11_rect(2.0 * math.pi * r, 1.0, 1.0 / r)
    return (0.25 * (3.0 + c11)) ** 2


def rect_duration_error_fidelity(delta):
    ratio = magic_ratio(1)
    omega = 1.0 / ratio
    t = (1.0 + delta) * 2.0 * math.pi / omega
    c01 = math.cos(0.5 * omega * t)
    c11 = c11_rect(t, 1.0, omega)
    return (0.25 * (2.0 - c01 + c11)) ** 2


def rect_coupling_error_fidelity(delta):
    ratio = magic_ratio(1)
    omega = 1.0 / ratio
    t = 2.0 * math.pi / omega
    c11 = c11_rect(t, 1.0 + delta, omega)
    return (0.25 * (3.0 + c11)) ** 2


class TestSweepSpec:
    def test_grid(self):
        spec = SweepSpec(axis="detuning", min=-1.0, max=1.0, points=5)
        assert np.allclose(grid(spec), [-1.0, -0.5, 0.0, 0.5, 1.0], atol=1e-15)

    def test_defaults(self):
        spec = SweepSpec.default("ratio-rect")
        assert (spec.min, spec.max, spec.points) == (0.2, 10.0, 197)

    def test_validation(self):
        with pytest.raises(ValueError):
            SweepSpec(axis="bogus", min=0.0, max=1.0, points=3)
        with pytest.raises(ValueError):
            SweepSpec(axis="gamma", min=1.0, max=0.0, points=3)
        with pytest.raises(ValueError):
            SweepSpec(axis="gamma", min=0.0, max=1.0, points=1)

    def test_worker_resolution(self):
        assert resolve_workers(3) == 3
        assert resolve_workers(None) >= 1
        with pytest.raises(ValueError):
            resolve_workers(0)


class TestRatioSweep:
    def test_rect_matches_closed_form(self):
        spec = SweepSpec(axis="ratio-rect", min=0.5, max=3.5, points=9)
        res = sweep_ratio("rect", spec)
        expected = np.array([rect_ratio_fidelity(r) for r in res.values])
        assert res.fidelity_gsc is None
        assert np.max(np.abs(res.fidelity_rect - expected)) < 1e-8

    def test_rect_local_maxima_at_locked_ratios(self):
        for k in (1, 2, 3):
            r = magic_ratio(k)
            spec = SweepSpec(axis="ratio-rect", min=r - 0.06, max=r + 0.06, points=5)
            fid = sweep_ratio("rect", spec).fidelity_rect
            assert fid[2] > 0.999
            assert fid[2] >= fid.max() - 1e-12

    def test_gsc_working_point(self):
        spec = SweepSpec(axis="ratio-gsc", min=1.2, max=1.4, points=3)
        res = sweep_ratio("gsc", spec)
        assert res.fidelity_rect is None
        assert np.all(res.fidelity_gsc > 0.99)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            sweep_ratio("triangle")


class TestRelativeErrorSweep:
    def test_zero_error_reproduces_bases(self):
        spec = SweepSpec(axis="rel-err-t", min=-0.1, max=0.1, points=5)
        res = sweep_relative_error("t", spec)
        base_gsc = bell_fidelity(
            run_gate(
                GateConfig(
                    params=SystemParams(g=1.0),
                    pulse=GaussianPulse.matched(1.0 / 1.3),
                )
            )
        )
        base_rect = bell_fidelity(
            run_gate(
                GateConfig(
                    params=SystemParams(g=1.0),
                    pulse=RectangularPulse(1.0 / magic_ratio(1)),
                )
            )
        )
        assert abs(res.fidelity_gsc[2] - base_gsc) < 1e-12
        assert abs(res.fidelity_rect[2] - base_rect) < 1e-12

    def test_rect_duration_error_closed_form(self):
        spec = SweepSpec(axis="rel-err-t", min=-0.2, max=0.2, points=5)
        res = sweep_relative_error("t", spec)
        expected = np.array([rect_duration_error_fidelity(d) for d in res.values])
        assert np.max(np.abs(res.fidelity_rect - expected)) < 1e-8

    def test_rect_coupling_error_closed_form(self):
        spec = SweepSpec(axis="rel-err-g", min=-0.2, max=0.2, points=5)
        res = sweep_relative_error("g", spec)
        expected = np.array([rect_coupling_error_fidelity(d) for d in res.values])
        assert np.max(np.abs(res.fidelity_rect - expected)) < 1e-8

    def test_soft_pulse_flatter_at_ten_percent(self):
        spec = SweepSpec(axis="rel-err-t", min=-0.1, max=0.1, points=3)
        for which in ("t", "g"):
            res = sweep_relative_error(which, spec)
            gsc_drop = res.fidelity_gsc[1] - np.array(
                [res.fidelity_gsc[0], res.fidelity_gsc[2]]
            )
            rect_drop = res.fidelity_rect[1] - np.array(
                [res.fidelity_rect[0], res.fidelity_rect[2]]
            )
            assert np.all(gsc_drop < rect_drop)

    def test_unknown_which_rejected(self):
        with pytest.raises(ValueError):
            sweep_relative_error("phase")


class TestDetuningSweep:
    def test_zero_detuning_matches_base(self):
        spec = SweepSpec(axis="detuning", min=-0.5, max=0.5, points=5)
        res = sweep_detuning(spec)
        base = bell_fidelity(
            run_gate(
                GateConfig(
                    params=SystemParams(g=1.0),
                    pulse=GaussianPulse.matched(1.0 / 1.3),
                )
            )
        )
        assert abs(res.fidelity_gsc[2] - base) < 1e-12
        assert res.fidelity_rect is None

    def test_moderate_detuning_stays_high(self):
        spec = SweepSpec(axis="detuning", min=-0.5, max=0.5, points=5)
        res = sweep_detuning(spec)
        assert np.all(res.fidelity_gsc > 0.95)


class TestDecaySweep:
    def test_zero_rate_matches_ideal(self):
        spec = SweepSpec(axis="kappa", min=0.0, max=0.01, points=3)
        res = sweep_decay("kappa", spec)
        ideal_gsc = bell_fidelity(
            run_gate(
                GateConfig(
                    params=SystemParams(g=1.0),
                    pulse=GaussianPulse.matched(1.0 / 1.3),
                    duration_override=18.4,
                )
            )
        )
        assert abs(res.fidelity_gsc[0] - ideal_gsc) < 1e-6

    def test_fidelity_decreases_with_rate(self):
        for which in ("gamma", "kappa"):
            spec = SweepSpec(axis=which, min=0.0, max=0.01, points=3)
            res = sweep_decay(which, spec)
            assert np.all(np.diff(res.fidelity_gsc) < 0.0)
            assert np.all(np.diff(res.fidelity_rect) < 0.0)

    def test_photon_loss_hurts_more_than_atom_decay(self):
        spec_g = SweepSpec(axis="gamma", min=0.0, max=0.01, points=2)
        spec_k = SweepSpec(axis="kappa", min=0.0, max=0.01, points=2)
        res_g = sweep_decay("gamma", spec_g)
        res_k = sweep_decay("kappa", spec_k)
        assert res_k.fidelity_gsc[1] < res_g.fidelity_gsc[1]
        assert res_k.fidelity_rect[1] < res_g.fidelity_rect[1]

    def test_soft_pulse_not_worse_than_comparator(self):
        for which in ("gamma", "kappa"):
            spec = SweepSpec(axis=which, min=0.0, max=0.01, points=3)
            res = sweep_decay(which, spec)
            assert np.all(res.fidelity_gsc >= res.fidelity_rect - 1e-9)

    def test_rect_only_curve_on_nominal_window(self):
        spec = SweepSpec(axis="kappa", min=0.0, max=0.01, points=2)
        res = sweep_decay(
            "kappa", spec, rect_ratio=magic_ratio(1), include_gsc=False, window=None
        )
        assert res.fidelity_gsc is None
        assert res.fidelity_rect.shape == (2,)
        assert res.meta["window"] == "nominal"
        ideal_fast = bell_fidelity(
            run_gate(
                GateConfig(
                    params=SystemParams(g=1.0),
                    pulse=RectangularPulse(1.0 / magic_ratio(1)),
                )
            )
        )
        assert abs(res.fidelity_rect[0] - ideal_fast) < 1e-6

    def test_negative_rates_rejected(self):
        with pytest.raises(ValueError):
            sweep_decay("gamma", SweepSpec(axis="gamma", min=-0.01, max=0.01, points=3))


class TestFidelityTrajectory:
    def test_endpoints_and_flat_start(self):
        res = fidelity_trajectory()
        assert res.values[0] == 0.0
        assert np.isclose(res.values[-1], 18.4, atol=1e-12)
        assert abs(res.fidelity_gsc[0] - 0.25) < 1e-12
        assert abs(res.fidelity_rect[0] - 0.25) < 1e-12
        assert res.fidelity_gsc[-1] > 0.99
        assert res.fidelity_rect[-1] > 0.99
        early = res.values < 0.15 * 18.4
        assert np.max(np.abs(res.fidelity_gsc[early] - 0.25)) < 0.02


class TestRunSweepDispatch:
    def test_each_axis_routes(self):
        spec = SweepSpec(axis="ratio-rect", min=0.8, max=0.9, points=2)
        assert run_sweep(spec).fidelity_rect is not None
        spec = SweepSpec(axis="detuning", min=-0.1, max=0.1, points=2)
        assert run_sweep(spec).fidelity_gsc is not None

    def test_deterministic_across_worker_counts(self):
        spec = SweepSpec(axis="ratio-rect", min=0.7, max=1.0, points=4)
        serial = run_sweep(spec, workers=1)
        parallel = run_sweep(spec, workers=2)
        assert np.array_equal(serial.fidelity_rect, parallel.fidelity_rect)
        assert np.array_equal(serial.values, parallel.values)

    def test_grid_refinement_shares_points(self):
        coarse = run_sweep(SweepSpec(axis="ratio-rect", min=0.7, max=1.0, points=4))
        fine = run_sweep(SweepSpec(axis="ratio-rect", min=0.7, max=1.0, points=7))
        assert np.max(np.abs(fine.values[::2] - coarse.values)) < 1e-12
        assert np.max(np.abs(fine.fidelity_rect[::2] - coarse.fidelity_rect)) < 1e-12

    def test_meta_records_parameters_and_timing(self):
        spec = SweepSpec(axis="gamma", min=0.0, max=0.002, points=2)
        res = run_sweep(spec)
        assert res.meta["points"] == 2
        assert res.meta["wall_clock_s"] > 0.0


class TestCesiumExample:
    def test_cesium_numbers_beat_098(self):
        assert cesium_example() > 0.98

    def test_zero_decay_physical_units_match_dimensionless(self):
        two_pi = 2.0 * math.pi
        g = two_pi * 2.0e6
        fid_phys = bell_fidelity(
            run_gate(
                GateConfig(
                    params=SystemParams(g=g),
                    pulse=GaussianPulse.matched(omega_m=g / 1.3),
                )
            )
        )
        fid_dimless = bell_fidelity(
            run_gate(
                GateConfig(
                    params=SystemParams(g=1.0),
                    pulse=GaussianPulse.matched(omega_m=1.0 / 1.3),
                )
            )
        )
        assert abs(fid_phys - fid_dimless) < 1e-9
