"""Pure-numpy twin of the compiled integrator kernels.

Same call signatures and sampling behavior as ``rydgate._kernels``;
selected automatically when the extension is absent or when
``RYDGATE_PURE_PYTHON=1``. Drift guards raise RuntimeError, which the
public layer rewraps.
"""

import math

import numpy as np


def _coeff(kind, amp, center, width, t):
    if kind == 0:
        return amp
    u = (t - center) / width
    return amp * math.exp(-u * u)


def _sample_slots(n_steps, stride):
    count = n_steps // stride + 1
    if n_steps % stride != 0:
        count += 1
    return count


def schrodinger_driven(h0, h1, kind, amp, center, width, psi0, n_steps, dt, stride, tol):
    dim = h0.shape[0]
    n_samp = _sample_slots(n_steps, stride)
    idx = np.empty(n_samp, dtype=np.int64)
    states = np.empty((n_samp, dim), dtype=complex)
    psi = np.array(psi0, dtype=complex)
    pos = 0

    def record(step):
        nonlocal pos
        norm = np.linalg.norm(psi)
        if not abs(norm - 1.0) <= tol:
            raise RuntimeError(
                f"norm drift {abs(norm - 1.0):.3e} at step {step} exceeds {tol:g}"
            )
        idx[pos] = step
        states[pos] = psi
        pos += 1

    record(0)
    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(n_steps):
        t = k * dt
        h_a = h0 + _coeff(kind, amp, center, width, t) * h1
        h_b = h0 + _coeff(kind, amp, center, width, t + half) * h1
        h_c = h0 + _coeff(kind, amp, center, width, t + dt) * h1
        k1 = -1j * (h_a @ psi)
        k2 = -1j * (h_b @ (psi + half * k1))
        k3 = -1j * (h_b @ (psi + half * k2))
        k4 = -1j * (h_c @ (psi + dt * k3))
        psi = psi + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        step = k + 1
        if step % stride == 0 or step == n_steps:
            record(step)
    return idx, states


def _unpack_jumps(jr, jc, jv, joff, dim):
    ops = []
    for j in range(len(joff) - 1):
        lo, hi = joff[j], joff[j + 1]
        op = np.zeros((dim, dim), dtype=complex)
        op[jr[lo:hi], jc[lo:hi]] = jv[lo:hi]
        ops.append(op)
    return ops


def lindblad_driven(a0, h1, jr, jc, jv, joff, kind, amp, center, width,
                    rho0, n_steps, dt, stride, tol):
    dim = a0.shape[0]
    jumps = _unpack_jumps(jr, jc, jv, joff, dim)
    daggers = [op.conj().T for op in jumps]
    n_samp = _sample_slots(n_steps, stride)
    idx = np.empty(n_samp, dtype=np.int64)
    rhos = np.empty((n_samp, dim, dim), dtype=complex)
    rho = np.array(rho0, dtype=complex)
    pos = 0

    def record(step):
        nonlocal pos
        trace = np.trace(rho).real
        if not abs(trace - 1.0) <= tol:
            raise RuntimeError(
                f"trace drift {abs(trace - 1.0):.3e} at step {step} exceeds {tol:g}"
            )
        idx[pos] = step
        rhos[pos] = rho
        pos += 1

    def rhs(c, r):
        a = a0 + c * h1
        out = -1j * (a @ r - r @ a.conj().T)
        for op, opd in zip(jumps, daggers):
            out += op @ r @ opd
        return out

    record(0)
    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(n_steps):
        t = k * dt
        c_a = _coeff(kind, amp, center, width, t)
        c_b = _coeff(kind, amp, center, width, t + half)
        c_c = _coeff(kind, amp, center, width, t + dt)
        k1 = rhs(c_a, rho)
        k2 = rhs(c_b, rho + half * k1)
        k3 = rhs(c_b, rho + half * k2)
        k4 = rhs(c_c, rho + dt * k3)
        rho = rho + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        step = k + 1
        if step % stride == 0 or step == n_steps:
            record(step)
    return idx, rhos
