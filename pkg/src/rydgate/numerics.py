"""Dense linear algebra and fixed-step RK4 integrators for small quantum systems.

Everything here works on plain complex128 numpy arrays. The two
integrators share one sampling policy: a uniform step grid that lands
exactly on the final time, thinned to at most ``SAMPLE_CAP`` interior
samples plus both endpoints. The hot loops live in a compiled Cython
kernel when available and in a pure-numpy twin otherwise; the public
functions behave identically either way.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

# Maximum number of interior trajectory samples kept per run.
SAMPLE_CAP = 2000
# Norm (state) or trace (density matrix) drift past this aborts a run.
DRIFT_TOL = 1e-6

if os.environ.get("RYDGATE_PURE_PYTHON", "0") not in ("", "0"):
    from rydgate import _kernels_py as _kern

    _COMPILED = False
else:
    try:
        from rydgate import _kernels as _kern

        _COMPILED = True
    except ImportError:
        from rydgate import _kernels_py as _kern

        _COMPILED = False


def kernel_backend():
    """Name of the integrator backend in use: 'compiled' or 'python'."""
    return "compiled" if _COMPILED else "python"


def _active_kernels():
    return _kern


class IntegrationError(RuntimeError):
    """A trajectory's norm or trace drifted beyond DRIFT_TOL."""


_COEFF_KINDS = {"const": 0, "gaussian": 1}


@dataclass(frozen=True)
class Coefficient:
    """Scalar drive schedule c(t).

    kind 'const' evaluates to ``amp`` everywhere; kind 'gaussian'
    evaluates to ``amp * exp(-((t - center) / width)**2)``.
    """

    kind: str
    amp: float
    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in _COEFF_KINDS:
            raise ValueError(f"unknown coefficient kind: {self.kind!r}")
        if self.kind == "gaussian" and not self.width > 0.0:
            raise ValueError("gaussian coefficient needs width > 0")

    @property
    def code(self):
        return _COEFF_KINDS[self.kind]

    def __call__(self, t):
        if self.kind == "const":
            return self.amp
        u = (t - self.center) / self.width
        return self.amp * math.exp(-u * u)


@dataclass(frozen=True)
class DrivenHamiltonian:
    """H(t) = static + coeff(t) * drive.

    Both parts are constant square matrices of the same dimension.
    Instances are valid ``h_of_t`` callables for the integrators, and
    their split structure lets the compiled kernels evaluate the time
    dependence without entering Python.
    """

    static: np.ndarray
    drive: np.ndarray
    coeff: Coefficient

    def __post_init__(self):
        s, d = np.asarray(self.static), np.asarray(self.drive)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError("static part must be a square matrix")
        if d.shape != s.shape:
            raise ValueError("drive part must match the static part's shape")

    @property
    def dim(self):
        return self.static.shape[0]

    def __call__(self, t):
        return self.static + self.coeff(t) * self.drive


def matmul(a, b):
    """Product of two square matrices of equal dimension."""
    a, b = np.asarray(a), np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matmul expects square matrices")
    if b.shape != a.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b


def dagger(m):
    """Conjugate transpose."""
    return np.asarray(m).conj().T.copy()


def kron(a, b):
    """Kronecker product, first factor major in the flat index."""
    return np.kron(np.asarray(a), np.asarray(b))


def hermitian_eig(m, herm_tol=1e-12):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues ascending and
    eigenvectors as the columns of a unitary matrix. Inputs that deviate
    from Hermiticity by more than ``herm_tol`` (max entry) are rejected.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("hermitian_eig expects a square matrix")
    if np.max(np.abs(m - m.conj().T)) > herm_tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(m)
    return w, v


def propagator_exact(h, t):
    """Unitary exp(-i h t) for a constant Hermitian h, via eigendecomposition."""
    w, v = hermitian_eig(h)
    phases = np.exp(-1j * w * t)
    return (v * phases) @ v.conj().T


def _step_grid(t_final, dt):
    """Uniform step count and adjusted step landing exactly on t_final."""
    if t_final < 0.0:
        raise ValueError("final time must be nonnegative")
    if t_final == 0.0:
        return 0, 0.0
    if dt <= 0.0:
        raise ValueError("time step must be positive")
    ratio = t_final / dt
    nearest = round(ratio)
    if nearest >= 1 and abs(ratio - nearest) <= 1e-9 * max(1.0, ratio):
        n = int(nearest)
    else:
        n = int(math.ceil(ratio))
    return max(n, 1), t_final / max(n, 1)


def _stride(n_steps):
    return max(1, -(-n_steps // SAMPLE_CAP))


def _times(idx, dt, t_final):
    t = idx.astype(np.float64) * dt
    t[-1] = t_final
    return t


def _as_hamiltonian(h_of_t, dim):
    if isinstance(h_of_t, DrivenHamiltonian):
        if h_of_t.dim != dim:
            raise ValueError("Hamiltonian dimension does not match the state")
        return h_of_t
    if isinstance(h_of_t, np.ndarray):
        h = np.asarray(h_of_t, dtype=complex)
        if h.shape != (dim, dim):
            raise ValueError("Hamiltonian dimension does not match the state")
        zero = np.zeros_like(h)
        return DrivenHamiltonian(static=h, drive=zero, coeff=Coefficient("const", 0.0))
    if callable(h_of_t):
        probe = np.asarray(h_of_t(0.0))
        if probe.shape != (dim, dim):
            raise ValueError("Hamiltonian dimension does not match the state")
        return h_of_t
    raise TypeError("h_of_t must be a matrix, DrivenHamiltonian, or callable")


def integrate_schrodinger(h_of_t, psi0, t_final, dt):
    """Propagate a pure state with classical RK4 on a uniform grid.

    Parameters
    ----------
    h_of_t : array, DrivenHamiltonian, or callable t -> matrix
        Hamiltonian; a constant matrix is treated as time independent.
    psi0 : complex vector, normalized
    t_final : float
        Nonnegative end time; zero returns the single initial sample.
    dt : float
        Upper bound on the step; the actual step is t_final divided by
        the smallest integer count that respects the bound.

    Returns
    -------
    times, states
        ``times`` has the sampled instants (t = 0 and t = t_final always
        included), ``states[i]`` the state at ``times[i]``.
    """
    psi0 = np.ascontiguousarray(psi0, dtype=complex)
    if psi0.ndim != 1:
        raise ValueError("psi0 must be a vector")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ValueError("psi0 must be normalized")
    dim = psi0.shape[0]
    h = _as_hamiltonian(h_of_t, dim)
    n_steps, dt_actual = _step_grid(t_final, dt)
    if n_steps == 0:
        return np.zeros(1), psi0[None, :].copy()
    stride = _stride(n_steps)
    if isinstance(h, DrivenHamiltonian):
        c = h.coeff
        try:
            idx, states = _kern.schrodinger_driven(
                np.ascontiguousarray(h.static, dtype=complex),
                np.ascontiguousarray(h.drive, dtype=complex),
                c.code, c.amp, c.center, c.width,
                psi0, n_steps, dt_actual, stride, DRIFT_TOL,
            )
        except RuntimeError as err:
            raise IntegrationError(str(err)) from None
    else:
        idx, states = _schrodinger_generic(h, psi0, n_steps, dt_actual, stride)
    return _times(idx, dt_actual, t_final), states


def _sample_slots(n_steps, stride):
    count = n_steps // stride + 1
    if n_steps % stride != 0:
        count += 1
    return count


def _schrodinger_generic(h_of_t, psi0, n_steps, dt, stride):
    dim = psi0.shape[0]
    n_samp = _sample_slots(n_steps, stride)
    idx = np.empty(n_samp, dtype=np.int64)
    states = np.empty((n_samp, dim), dtype=complex)
    psi = psi0.copy()
    pos = 0

    def record(step):
        nonlocal pos
        norm = np.linalg.norm(psi)
        if not abs(norm - 1.0) <= DRIFT_TOL:
            raise IntegrationError(
                f"norm drift {abs(norm - 1.0):.3e} at step {step} exceeds {DRIFT_TOL:g}"
            )
        idx[pos] = step
        states[pos] = psi
        pos += 1

    record(0)
    half = 0.5 * dt
    for k in range(n_steps):
        t = k * dt
        h_a = np.asarray(h_of_t(t), dtype=complex)
        h_b = np.asarray(h_of_t(t + half), dtype=complex)
        h_c = np.asarray(h_of_t(t + dt), dtype=complex)
        k1 = -1j * (h_a @ psi)
        k2 = -1j * (h_b @ (psi + half * k1))
        k3 = -1j * (h_b @ (psi + half * k2))
        k4 = -1j * (h_c @ (psi + dt * k3))
        psi = psi + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        step = k + 1
        if step % stride == 0 or step == n_steps:
            record(step)
    return idx, states


def _check_density(rho0, dim):
    if rho0.shape != (dim, dim):
        raise ValueError("rho0 must be a square matrix matching the space")
    if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-10:
        raise ValueError("rho0 must be Hermitian")
    if abs(np.trace(rho0).real - 1.0) > 1e-10:
        raise ValueError("rho0 must have unit trace")
    if np.linalg.eigvalsh(rho0).min() < -1e-10:
        raise ValueError("rho0 must be positive semidefinite")


def _pack_lindblad(static, drive, collapse):
    """Flatten the Lindblad pieces for the driven kernels.

    Returns the non-Hermitian effective static part
    ``static - (i/2) sum(L^dag L)``, the drive matrix, and the collapse
    operators as flat nonzero-entry arrays with per-operator offsets.
    """
    dim = static.shape[0]
    msum = np.zeros((dim, dim), dtype=complex)
    rows, cols, vals, offsets = [], [], [], [0]
    for op in collapse:
        op = np.asarray(op, dtype=complex)
        if op.shape != (dim, dim):
            raise ValueError("collapse operator dimension mismatch")
        msum += op.conj().T @ op
        r, c = np.nonzero(op)
        rows.extend(r.tolist())
        cols.extend(c.tolist())
        vals.extend(op[r, c].tolist())
        offsets.append(len(rows))
    a0 = np.ascontiguousarray(static - 0.5j * msum, dtype=complex)
    return (
        a0,
        np.ascontiguousarray(drive, dtype=complex),
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(vals, dtype=complex),
        np.asarray(offsets, dtype=np.int64),
    )


def integrate_lindblad(h_of_t, collapse, rho0, t_final, dt):
    """Propagate a density matrix under a Lindblad master equation.

    Same stepping and sampling rules as ``integrate_schrodinger``. The
    initial density matrix must be Hermitian, unit trace, and positive
    semidefinite within 1e-10; trace drift beyond DRIFT_TOL at a sample
    aborts the run.
    """
    rho0 = np.ascontiguousarray(rho0, dtype=complex)
    if rho0.ndim != 2:
        raise ValueError("rho0 must be a matrix")
    dim = rho0.shape[0]
    _check_density(rho0, dim)
    collapse = [np.ascontiguousarray(op, dtype=complex) for op in collapse]
    h = _as_hamiltonian(h_of_t, dim)
    n_steps, dt_actual = _step_grid(t_final, dt)
    if n_steps == 0:
        return np.zeros(1), rho0[None, :, :].copy()
    stride = _stride(n_steps)
    if isinstance(h, DrivenHamiltonian):
        packed = _pack_lindblad(
            np.ascontiguousarray(h.static, dtype=complex),
            np.ascontiguousarray(h.drive, dtype=complex),
            collapse,
        )
        c = h.coeff
        try:
            idx, rhos = _kern.lindblad_driven(
                *packed, c.code, c.amp, c.center, c.width,
                rho0, n_steps, dt_actual, stride, DRIFT_TOL,
            )
        except RuntimeError as err:
            raise IntegrationError(str(err)) from None
    else:
        idx, rhos = _lindblad_generic(h, collapse, rho0, n_steps, dt_actual, stride)
    return _times(idx, dt_actual, t_final), rhos


def _lindblad_generic(h_of_t, collapse, rho0, n_steps, dt, stride):
    dim = rho0.shape[0]
    msum = np.zeros((dim, dim), dtype=complex)
    for op in collapse:
        msum += op.conj().T @ op
    daggers = [op.conj().T for op in collapse]

    def rhs(h_t, rho):
        out = -1j * (h_t @ rho - rho @ h_t) - 0.5 * (msum @ rho + rho @ msum)
        for op, opd in zip(collapse, daggers):
            out += op @ rho @ opd
        return out

    n_samp = _sample_slots(n_steps, stride)
    idx = np.empty(n_samp, dtype=np.int64)
    rhos = np.empty((n_samp, dim, dim), dtype=complex)
    rho = rho0.copy()
    pos = 0

    def record(step):
        nonlocal pos
        trace = np.trace(rho).real
        if not abs(trace - 1.0) <= DRIFT_TOL:
            raise IntegrationError(
                f"trace drift {abs(trace - 1.0):.3e} at step {step} exceeds {DRIFT_TOL:g}"
            )
        idx[pos] = step
        rhos[pos] = rho
        pos += 1

    record(0)
    half = 0.5 * dt
    for k in range(n_steps):
        t = k * dt
        h_a = np.asarray(h_of_t(t), dtype=complex)
        h_b = np.asarray(h_of_t(t + half), dtype=complex)
        h_c = np.asarray(h_of_t(t + dt), dtype=complex)
        k1 = rhs(h_a, rho)
        k2 = rhs(h_b, rho + half * k1)
        k3 = rhs(h_b, rho + half * k2)
        k4 = rhs(h_c, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        step = k + 1
        if step % stride == 0 or step == n_steps:
            record(step)
    return idx, rhos
