"""Parameter sweeps and reference-figure experiments.

All sweeps run in dimensionless mode (g = 1) over linspace grids and
score the benchmark-superposition fidelity at the end of each window.
Points are independent, so they fan out over a process pool; results
are gathered in grid order, which keeps the output identical for any
worker count.

Scheme bases used throughout: the soft Gaussian pulse at
g/omega_m = 1.3, and rectangular drives at either the first locked
ratio sqrt(3)/2 (fastest exact gate) or 2.9 (the near-matched-duration
comparator). Robustness scans run each scheme on its own nominal
window; decay scans score both schemes at one shared window so they
see equal exposure.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from rydgate.gate import GateConfig, bell_fidelity, run_gate
from rydgate.model import (
    GaussianPulse,
    RectangularPulse,
    SystemParams,
    gate_time,
    magic_ratio,
)

AXES = (
    "ratio-rect",
    "ratio-gsc",
    "rel-err-t",
    "rel-err-g",
    "detuning",
    "gamma",
    "kappa",
    "time",
)

# axis -> (min, max, points) used when a sweep does not say otherwise
DEFAULT_RANGES = {
    "ratio-rect": (0.2, 10.0, 197),
    "ratio-gsc": (0.2, 10.0, 197),
    "rel-err-t": (-0.2, 0.2, 81),
    "rel-err-g": (-0.2, 0.2, 81),
    "detuning": (-1.0, 1.0, 101),
    "gamma": (0.0, 0.02, 41),
    "kappa": (0.0, 0.02, 41),
    "time": (0.0, 18.4, 2001),
}

GSC_RATIO = 1.3
RECT_COMPARATOR_RATIO = 2.9
SHARED_WINDOW = 18.4

# recorded in sweep metadata; the per-point step follows this bound
DT_RULE = "min(T/20000,0.02/max(g,peak))"


@dataclass(frozen=True)
class SweepSpec:
    """Axis name plus a uniform grid over [min, max]."""

    axis: str
    min: float
    max: float
    points: int

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"unknown sweep axis: {self.axis!r}")
        if not self.min < self.max:
            raise ValueError("sweep needs min < max")
        if self.points < 2:
            raise ValueError("sweep needs at least 2 points")

    @classmethod
    def default(cls, axis):
        lo, hi, points = DEFAULT_RANGES[axis]
        return cls(axis=axis, min=lo, max=hi, points=points)


@dataclass(frozen=True)
class SweepResult:
    """One or two fidelity curves over a common axis.

    Unused scheme columns are None. meta records the parameters that
    produced the curves plus the wall-clock seconds spent.
    """

    axis: str
    values: np.ndarray
    fidelity_gsc: np.ndarray | None
    fidelity_rect: np.ndarray | None
    meta: dict


def grid(spec):
    return np.linspace(spec.min, spec.max, spec.points)


def resolve_workers(workers):
    if workers is None:
        return os.cpu_count() or 1
    if workers < 1:
        raise ValueError("worker count must be at least 1")
    return workers


def _bell_point(config):
    return bell_fidelity(run_gate(config))


def _map_fidelity(configs, workers):
    workers = resolve_workers(workers)
    if workers <= 1 or len(configs) <= 1:
        return np.array([_bell_point(c) for c in configs])
    chunk = max(1, len(configs) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return np.array(list(pool.map(_bell_point, configs, chunksize=chunk)))


def _gsc_pulse(g=1.0, ratio=GSC_RATIO):
    return GaussianPulse.matched(omega_m=g / ratio)


def _rect_pulse(g=1.0, ratio=RECT_COMPARATOR_RATIO):
    return RectangularPulse(omega=g / ratio)


def sweep_ratio(kind, spec=None, workers=None):
    """Fidelity against the coupling-to-drive ratio for one pulse scheme
    ('rect' or 'gsc'), each point on its own nominal window."""
    if kind not in ("rect", "gsc"):
        raise ValueError("kind must be 'rect' or 'gsc'")
    spec = spec or SweepSpec.default(f"ratio-{kind}")
    ratios = grid(spec)
    if kind == "rect":
        configs = [
            GateConfig(params=SystemParams(g=1.0), pulse=RectangularPulse(1.0 / r))
            for r in ratios
        ]
    else:
        configs = [
            GateConfig(params=SystemParams(g=1.0), pulse=GaussianPulse.matched(1.0 / r))
            for r in ratios
        ]
    start = time.perf_counter()
    fid = _map_fidelity(configs, workers)
    meta = {
        "axis": spec.axis,
        "min": spec.min,
        "max": spec.max,
        "points": spec.points,
        "g": 1.0,
        "dt_rule": DT_RULE,
        "scheme": kind,
        "wall_clock_s": time.perf_counter() - start,
    }
    return SweepResult(
        axis=spec.axis,
        values=ratios,
        fidelity_gsc=fid if kind == "gsc" else None,
        fidelity_rect=fid if kind == "rect" else None,
        meta=meta,
    )


def sweep_relative_error(which, spec=None, workers=None):
    """Fidelity against a relative error in the gate duration ('t') or in
    the coupling ('g'), for the soft pulse at 1.3 and the fast
    rectangular gate at sqrt(3)/2.

    A duration error stretches the evaluation window while each drive
    keeps its nominal schedule; a coupling error perturbs g while the
    drive amplitudes stay at their nominal values.
    """
    if which not in ("t", "g"):
        raise ValueError("which must be 't' or 'g'")
    spec = spec or SweepSpec.default(f"rel-err-{which}")
    deltas = grid(spec)
    rect_ratio = magic_ratio(1)
    gsc_pulse = _gsc_pulse()
    rect_pulse = RectangularPulse(omega=1.0 / rect_ratio)
    gsc_t = gate_time(gsc_pulse)
    rect_t = gate_time(rect_pulse)
    gsc_configs, rect_configs = [], []
    for delta in deltas:
        if which == "t":
            gsc_configs.append(
                GateConfig(
                    params=SystemParams(g=1.0),
                    pulse=gsc_pulse,
                    duration_override=(1.0 + delta) * gsc_t,
                )
            )
            rect_configs.append(
                GateConfig(
                    params=SystemParams(g=1.0),
                    pulse=rect_pulse,
                    duration_override=(1.0 + delta) * rect_t,
                )
            )
        else:
            gsc_configs.append(
                GateConfig(params=SystemParams(g=1.0 + delta), pulse=gsc_pulse)
            )
            rect_configs.append(
                GateConfig(params=SystemParams(g=1.0 + delta), pulse=rect_pulse)
            )
    start = time.perf_counter()
    fid_gsc = _map_fidelity(gsc_configs, workers)
    fid_rect = _map_fidelity(rect_configs, workers)
    meta = {
        "axis": spec.axis,
        "min": spec.min,
        "max": spec.max,
        "points": spec.points,
        "g": 1.0,
        "dt_rule": DT_RULE,
        "gsc_ratio": GSC_RATIO,
        "rect_ratio": rect_ratio,
        "wall_clock_s": time.perf_counter() - start,
    }
    return SweepResult(
        axis=spec.axis,
        values=deltas,
        fidelity_gsc=fid_gsc,
        fidelity_rect=fid_rect,
        meta=meta,
    )


def sweep_detuning(spec=None, workers=None):
    """Soft-pulse fidelity against the second Rydberg level's Stark
    detuning, the first level detuned down by the polarizability ratio."""
    spec = spec or SweepSpec.default("detuning")
    detunings = grid(spec)
    configs = [
        GateConfig(
            params=SystemParams(g=1.0, delta2=float(d)), pulse=_gsc_pulse()
        )
        for d in detunings
    ]
    start = time.perf_counter()
    fid = _map_fidelity(configs, workers)
    meta = {
        "axis": spec.axis,
        "min": spec.min,
        "max": spec.max,
        "points": spec.points,
        "g": 1.0,
        "dt_rule": DT_RULE,
        "gsc_ratio": GSC_RATIO,
        "polar_ratio": 22.0,
        "wall_clock_s": time.perf_counter() - start,
    }
    return SweepResult(
        axis=spec.axis, values=detunings, fidelity_gsc=fid, fidelity_rect=None,
        meta=meta,
    )


def sweep_decay(which, spec=None, workers=None, rect_ratio=RECT_COMPARATOR_RATIO,
                include_gsc=True, window=SHARED_WINDOW):
    """Fidelity against one decay rate (in units of g): 'gamma' drives
    both Rydberg decay channels at the grid value, 'kappa' the photon
    loss. Curves for the soft pulse and/or a rectangular comparator.

    Both schemes are scored at the same evaluation window (18.4/g by
    default) so the comparison sees equal decay exposure; window=None
    instead scores each scheme on its own nominal duration, which is the
    fair setting for the fast sqrt(3)/2 comparator."""
    if which not in ("gamma", "kappa"):
        raise ValueError("which must be 'gamma' or 'kappa'")
    spec = spec or SweepSpec.default(which)
    if spec.min < 0.0:
        raise ValueError("decay rates must be nonnegative")
    rates = grid(spec)

    def params_for(rate):
        if which == "gamma":
            return SystemParams(g=1.0, gamma1=float(rate), gamma2=float(rate))
        return SystemParams(g=1.0, kappa=float(rate))

    rect_configs = [
        GateConfig(
            params=params_for(r),
            pulse=_rect_pulse(ratio=rect_ratio),
            dissipative=True,
            duration_override=window,
        )
        for r in rates
    ]
    start = time.perf_counter()
    fid_gsc = None
    if include_gsc:
        gsc_configs = [
            GateConfig(
                params=params_for(r),
                pulse=_gsc_pulse(),
                dissipative=True,
                duration_override=window,
            )
            for r in rates
        ]
        fid_gsc = _map_fidelity(gsc_configs, workers)
    fid_rect = _map_fidelity(rect_configs, workers)
    meta = {
        "axis": spec.axis,
        "min": spec.min,
        "max": spec.max,
        "points": spec.points,
        "g": 1.0,
        "dt_rule": DT_RULE,
        "rect_ratio": rect_ratio,
        "window": "nominal" if window is None else window,
        "wall_clock_s": time.perf_counter() - start,
    }
    if include_gsc:
        meta["gsc_ratio"] = GSC_RATIO
    return SweepResult(
        axis=spec.axis, values=rates, fidelity_gsc=fid_gsc, fidelity_rect=fid_rect,
        meta=meta,
    )


def fidelity_trajectory(window=SHARED_WINDOW):
    """Benchmark fidelity against time over a shared window for the soft
    pulse and its rectangular comparator, both drives on their nominal
    schedules. The two runs share one step grid, so the curves sit on
    identical time samples."""
    start = time.perf_counter()
    res_gsc = run_gate(
        GateConfig(
            params=SystemParams(g=1.0), pulse=_gsc_pulse(), duration_override=window
        )
    )
    res_rect = run_gate(
        GateConfig(
            params=SystemParams(g=1.0), pulse=_rect_pulse(), duration_override=window
        )
    )
    if not np.array_equal(res_gsc.times, res_rect.times):
        raise RuntimeError("trajectory runs produced different time grids")
    meta = {
        "axis": "time",
        "min": 0.0,
        "max": window,
        "points": len(res_gsc.times),
        "g": 1.0,
        "dt_rule": DT_RULE,
        "gsc_ratio": GSC_RATIO,
        "rect_ratio": RECT_COMPARATOR_RATIO,
        "wall_clock_s": time.perf_counter() - start,
    }
    return SweepResult(
        axis="time",
        values=res_gsc.times,
        fidelity_gsc=res_gsc.fidelity,
        fidelity_rect=res_rect.fidelity,
        meta=meta,
    )


def run_sweep(spec, workers=None):
    """Dispatch a SweepSpec to the sweep it names. The 'time' axis
    ignores the grid and uses the shared-window trajectory."""
    if spec.axis == "ratio-rect":
        return sweep_ratio("rect", spec, workers)
    if spec.axis == "ratio-gsc":
        return sweep_ratio("gsc", spec, workers)
    if spec.axis == "rel-err-t":
        return sweep_relative_error("t", spec, workers)
    if spec.axis == "rel-err-g":
        return sweep_relative_error("g", spec, workers)
    if spec.axis == "detuning":
        return sweep_detuning(spec, workers)
    if spec.axis in ("gamma", "kappa"):
        return sweep_decay(spec.axis, spec, workers)
    if spec.axis == "time":
        return fidelity_trajectory(window=spec.max)
    raise ValueError(f"unknown sweep axis: {spec.axis!r}")


def cesium_example():
    """Dissipative soft-pulse gate at realistic cesium-atom numbers:
    g = 2 pi x 2 MHz, drive peak g/1.3, Rydberg decay rates
    2 pi x 194 Hz and 2 pi x 80 Hz, photon loss 2 pi x 5 kHz. Returns
    the final benchmark fidelity."""
    two_pi = 2.0 * np.pi
    g = two_pi * 2.0e6
    params = SystemParams(
        g=g,
        gamma1=two_pi * 194.0,
        gamma2=two_pi * 80.0,
        kappa=two_pi * 5.0e3,
    )
    config = GateConfig(
        params=params, pulse=GaussianPulse.matched(omega_m=g / GSC_RATIO),
        dissipative=True,
    )
    return bell_fidelity(run_gate(config))
