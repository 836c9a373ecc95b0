# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 kernels for driven Schrodinger and Lindblad propagation.

Call-compatible with ``rydgate._kernels_py``. The Hamiltonian is the
split form h0 + c(t) h1 with c a constant or Gaussian schedule, so each
step stays in C. Collapse operators arrive as flat nonzero-entry arrays
and are applied pairwise, which beats dense matmuls for the few-entry
jump operators this package produces.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

ctypedef double complex cplx

cdef cplx MINUS_I = -1.0j


cdef inline double _coeff(int kind, double amp, double center, double width,
                          double t) noexcept:
    if kind == 0:
        return amp
    cdef double u = (t - center) / width
    return amp * exp(-u * u)


cdef inline void _ham_vec(cplx[:, ::1] h0, cplx[:, ::1] h1, double c,
                          cplx[::1] x, cplx[::1] out, Py_ssize_t dim) noexcept:
    # out = -i (h0 + c h1) x
    cdef Py_ssize_t i, j
    cdef cplx acc
    for i in range(dim):
        acc = 0
        for j in range(dim):
            acc = acc + (h0[i, j] + c * h1[i, j]) * x[j]
        out[i] = MINUS_I * acc


def schrodinger_driven(h0_in, h1_in, int kind, double amp, double center,
                       double width, psi0, Py_ssize_t n_steps, double dt,
                       Py_ssize_t stride, double tol):
    cdef cplx[:, ::1] h0 = np.ascontiguousarray(h0_in, dtype=np.complex128)
    cdef cplx[:, ::1] h1 = np.ascontiguousarray(h1_in, dtype=np.complex128)
    cdef Py_ssize_t dim = h0.shape[0]

    cdef Py_ssize_t n_samp = n_steps // stride + 1
    if n_steps % stride != 0:
        n_samp += 1
    idx_arr = np.empty(n_samp, dtype=np.int64)
    states_arr = np.empty((n_samp, dim), dtype=np.complex128)
    cdef long long[::1] idx = idx_arr
    cdef cplx[:, ::1] states = states_arr

    psi_arr = np.array(psi0, dtype=np.complex128)
    cdef cplx[::1] psi = psi_arr
    cdef cplx[::1] k1 = np.empty(dim, dtype=np.complex128)
    cdef cplx[::1] k2 = np.empty(dim, dtype=np.complex128)
    cdef cplx[::1] k3 = np.empty(dim, dtype=np.complex128)
    cdef cplx[::1] k4 = np.empty(dim, dtype=np.complex128)
    cdef cplx[::1] tmp = np.empty(dim, dtype=np.complex128)

    cdef Py_ssize_t pos = 0, k, i, step
    cdef double t, c1, c2, c3, norm, half = 0.5 * dt, sixth = dt / 6.0

    norm = 0.0
    for i in range(dim):
        norm += psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
    norm = norm ** 0.5
    if not abs(norm - 1.0) <= tol:
        raise RuntimeError(f"norm drift {abs(norm - 1.0):.3e} at step 0 exceeds {tol:g}")
    idx[pos] = 0
    for i in range(dim):
        states[pos, i] = psi[i]
    pos += 1

    for k in range(n_steps):
        t = k * dt
        c1 = _coeff(kind, amp, center, width, t)
        c2 = _coeff(kind, amp, center, width, t + half)
        c3 = _coeff(kind, amp, center, width, t + dt)
        _ham_vec(h0, h1, c1, psi, k1, dim)
        for i in range(dim):
            tmp[i] = psi[i] + half * k1[i]
        _ham_vec(h0, h1, c2, tmp, k2, dim)
        for i in range(dim):
            tmp[i] = psi[i] + half * k2[i]
        _ham_vec(h0, h1, c2, tmp, k3, dim)
        for i in range(dim):
            tmp[i] = psi[i] + dt * k3[i]
        _ham_vec(h0, h1, c3, tmp, k4, dim)
        for i in range(dim):
            psi[i] = psi[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
        step = k + 1
        if step % stride == 0 or step == n_steps:
            norm = 0.0
            for i in range(dim):
                norm += psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
            norm = norm ** 0.5
            if not abs(norm - 1.0) <= tol:
                raise RuntimeError(
                    f"norm drift {abs(norm - 1.0):.3e} at step {step} exceeds {tol:g}"
                )
            idx[pos] = step
            for i in range(dim):
                states[pos, i] = psi[i]
            pos += 1

    return idx_arr, states_arr


cdef void _lindblad_rhs(cplx[:, ::1] a0, cplx[:, ::1] h1, double c,
                        long long[::1] jr, long long[::1] jc, cplx[::1] jv,
                        long long[::1] joff, cplx[:, ::1] a_buf,
                        cplx[:, ::1] rin, cplx[:, ::1] out,
                        Py_ssize_t dim) noexcept:
    # out = -i (A rin - rin A^dag) + sum_j L_j rin L_j^dag
    # with A = a0 + c h1 and the L_j given by their nonzero entries.
    cdef Py_ssize_t i, j, l, jj, a, b, njump = joff.shape[0] - 1
    cdef cplx acc
    for i in range(dim):
        for j in range(dim):
            a_buf[i, j] = a0[i, j] + c * h1[i, j]
    for i in range(dim):
        for j in range(dim):
            acc = 0
            for l in range(dim):
                acc = acc + a_buf[i, l] * rin[l, j] - rin[i, l] * a_buf[j, l].conjugate()
            out[i, j] = MINUS_I * acc
    for jj in range(njump):
        for a in range(joff[jj], joff[jj + 1]):
            for b in range(joff[jj], joff[jj + 1]):
                out[jr[a], jr[b]] = out[jr[a], jr[b]] + \
                    jv[a] * jv[b].conjugate() * rin[jc[a], jc[b]]


def lindblad_driven(a0_in, h1_in, jr_in, jc_in, jv_in, joff_in, int kind,
                    double amp, double center, double width, rho0,
                    Py_ssize_t n_steps, double dt, Py_ssize_t stride, double tol):
    cdef cplx[:, ::1] a0 = np.ascontiguousarray(a0_in, dtype=np.complex128)
    cdef cplx[:, ::1] h1 = np.ascontiguousarray(h1_in, dtype=np.complex128)
    cdef long long[::1] jr = np.ascontiguousarray(jr_in, dtype=np.int64)
    cdef long long[::1] jc = np.ascontiguousarray(jc_in, dtype=np.int64)
    cdef cplx[::1] jv = np.ascontiguousarray(jv_in, dtype=np.complex128)
    cdef long long[::1] joff = np.ascontiguousarray(joff_in, dtype=np.int64)
    cdef Py_ssize_t dim = a0.shape[0]

    cdef Py_ssize_t n_samp = n_steps // stride + 1
    if n_steps % stride != 0:
        n_samp += 1
    idx_arr = np.empty(n_samp, dtype=np.int64)
    rhos_arr = np.empty((n_samp, dim, dim), dtype=np.complex128)
    cdef long long[::1] idx = idx_arr
    cdef cplx[:, :, ::1] rhos = rhos_arr

    rho_arr = np.array(rho0, dtype=np.complex128)
    cdef cplx[:, ::1] rho = rho_arr
    cdef cplx[:, ::1] a_buf = np.empty((dim, dim), dtype=np.complex128)
    cdef cplx[:, ::1] k1 = np.empty((dim, dim), dtype=np.complex128)
    cdef cplx[:, ::1] k2 = np.empty((dim, dim), dtype=np.complex128)
    cdef cplx[:, ::1] k3 = np.empty((dim, dim), dtype=np.complex128)
    cdef cplx[:, ::1] k4 = np.empty((dim, dim), dtype=np.complex128)
    cdef cplx[:, ::1] tmp = np.empty((dim, dim), dtype=np.complex128)

    cdef Py_ssize_t pos = 0, k, i, j, step
    cdef double t, c1, c2, c3, trace, half = 0.5 * dt, sixth = dt / 6.0

    trace = 0.0
    for i in range(dim):
        trace += rho[i, i].real
    if not abs(trace - 1.0) <= tol:
        raise RuntimeError(f"trace drift {abs(trace - 1.0):.3e} at step 0 exceeds {tol:g}")
    idx[pos] = 0
    for i in range(dim):
        for j in range(dim):
            rhos[pos, i, j] = rho[i, j]
    pos += 1

    for k in range(n_steps):
        t = k * dt
        c1 = _coeff(kind, amp, center, width, t)
        c2 = _coeff(kind, amp, center, width, t + half)
        c3 = _coeff(kind, amp, center, width, t + dt)
        _lindblad_rhs(a0, h1, c1, jr, jc, jv, joff, a_buf, rho, k1, dim)
        for i in range(dim):
            for j in range(dim):
                tmp[i, j] = rho[i, j] + half * k1[i, j]
        _lindblad_rhs(a0, h1, c2, jr, jc, jv, joff, a_buf, tmp, k2, dim)
        for i in range(dim):
            for j in range(dim):
                tmp[i, j] = rho[i, j] + half * k2[i, j]
        _lindblad_rhs(a0, h1, c2, jr, jc, jv, joff, a_buf, tmp, k3, dim)
        for i in range(dim):
            for j in range(dim):
                tmp[i, j] = rho[i, j] + dt * k3[i, j]
        _lindblad_rhs(a0, h1, c3, jr, jc, jv, joff, a_buf, tmp, k4, dim)
        for i in range(dim):
            for j in range(dim):
                rho[i, j] = rho[i, j] + sixth * (k1[i, j] + 2.0 * (k2[i, j] + k3[i, j]) + k4[i, j])
        step = k + 1
        if step % stride == 0 or step == n_steps:
            trace = 0.0
            for i in range(dim):
                trace += rho[i, i].real
            if not abs(trace - 1.0) <= tol:
                raise RuntimeError(
                    f"trace drift {abs(trace - 1.0):.3e} at step {step} exceeds {tol:g}"
                )
            idx[pos] = step
            for i in range(dim):
                for j in range(dim):
                    rhos[pos, i, j] = rho[i, j]
            pos += 1

    return idx_arr, rhos_arr
