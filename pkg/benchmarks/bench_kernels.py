"""Timing comparison of the compiled integrator kernels vs the numpy twin.

Runs the two hot loops (driven Schrodinger and driven Lindblad RK4) on a
representative soft-pulse gate workload, once per available backend, and
reports wall time per run together with the agreement between backends.
Both kernel modules are imported directly, so the comparison works no
matter which backend the package itself selected at import time.

Usage:

    python3 benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from rydgate import numerics
from rydgate.gate import initial_state, integration_step
from rydgate.model import (
    GaussianPulse,
    SystemParams,
    collapse_operators,
    gate_time,
    split_hamiltonian,
)

try:
    from rydgate import _kernels

    HAVE_COMPILED = True
except ImportError:
    _kernels = None
    HAVE_COMPILED = False

from rydgate import _kernels_py

GSC_RATIO = 1.3
DECAY_RATE = 0.01


def _workload(dissipative):
    """Kernel arguments for one soft-pulse gate run.

    Returns (args, final_index) where ``args`` is the positional tuple
    for ``schrodinger_driven`` or ``lindblad_driven`` and ``final_index``
    picks the last sampled state out of the kernel's output.
    """
    rates = {"gamma1": DECAY_RATE, "gamma2": DECAY_RATE, "kappa": DECAY_RATE}
    params = SystemParams(g=1.0, **(rates if dissipative else {}))
    pulse = GaussianPulse.matched(params.g / GSC_RATIO)
    t_final = gate_time(pulse)
    ham = split_hamiltonian(params, pulse)
    n_steps, dt = numerics._step_grid(t_final, integration_step(params, pulse, t_final))
    stride = numerics._stride(n_steps)
    c = ham.coeff
    psi0 = initial_state()
    if dissipative:
        a0, h1, jr, jc, jv, joff = numerics._pack_lindblad(
            ham.static, ham.drive, collapse_operators(params)
        )
        rho0 = np.outer(psi0, psi0.conj())
        args = (a0, h1, jr, jc, jv, joff, c.code, c.amp, c.center, c.width,
                rho0, n_steps, dt, stride, numerics.DRIFT_TOL)
    else:
        args = (np.ascontiguousarray(ham.static), np.ascontiguousarray(ham.drive),
                c.code, c.amp, c.center, c.width,
                psi0, n_steps, dt, stride, numerics.DRIFT_TOL)
    return args, n_steps


def _time_call(fn, args, repeats):
    """Best wall time over ``repeats`` calls, plus the last result."""
    best = np.inf
    out = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def _report(name, n_steps, rows, diff):
    print(f"{name} ({n_steps} RK4 steps, dim 8)")
    base = rows["python"][0]
    for backend, (secs, _) in rows.items():
        extra = "" if backend == "python" else f"   ({base / secs:.1f}x faster)"
        print(f"  {backend:<9} {secs * 1e3:9.2f} ms{extra}")
    if diff is not None:
        print(f"  max backend disagreement over sampled outputs: {diff:.2e}")
    print()


def run_benchmark(repeats):
    print(f"package-selected backend: {numerics.kernel_backend()}")
    if not HAVE_COMPILED:
        print("compiled extension not built; timing the numpy twin only")
    print()
    cases = (
        ("unitary gate", False, "schrodinger_driven"),
        ("dissipative gate", True, "lindblad_driven"),
    )
    for name, dissipative, fn_name in cases:
        args, n_steps = _workload(dissipative)
        rows = {"python": _time_call(getattr(_kernels_py, fn_name), args, repeats)}
        diff = None
        if HAVE_COMPILED:
            rows["compiled"] = _time_call(getattr(_kernels, fn_name), args, repeats)
            idx_py, out_py = rows["python"][1]
            idx_c, out_c = rows["compiled"][1]
            assert np.array_equal(idx_py, idx_c)
            diff = float(np.max(np.abs(out_py - out_c)))
        _report(name, n_steps, rows, diff)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="calls per backend; the best time is kept")
    opts = parser.parse_args(argv)
    if opts.repeats < 1:
        parser.error("--repeats must be at least 1")
    run_benchmark(opts.repeats)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
