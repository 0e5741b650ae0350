# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Fused leapfrog kernel for the first-order wave system.

Advances (u1, u2) with u1' = u2, u2' = u1'' - Veff u1 - f(u1) using
kick-drift-kick steps on a periodic grid with a 4th order Laplacian stencil,
an optional multiplicative absorbing layer applied after every step, and a
polynomial nonlinearity f(u) = sum_l c_l u^l (l >= 2) evaluated by Horner.
"""

import numpy as np
cimport numpy as cnp


cdef inline double _fval(double u, const double[::1] fc, Py_ssize_t nc) nogil:
    # f(u) = u^2 (c2 + u (c3 + ...)) with fc = [c2, c3, ...]
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(nc - 1, -1, -1):
        acc = fc[i] + u * acc
    return u * u * acc


cdef void _accel(const double[::1] u1, const double[::1] Veff,
                 const double[::1] fc, Py_ssize_t nc,
                 double inv12h2, double[::1] out) nogil:
    cdef Py_ssize_t n = u1.shape[0]
    cdef Py_ssize_t i, im1, im2, ip1, ip2
    cdef double lap
    for i in range(n):
        im1 = i - 1 if i >= 1 else n - 1
        im2 = i - 2 if i >= 2 else i - 2 + n
        ip1 = i + 1 if i + 1 < n else 0
        ip2 = i + 2 if i + 2 < n else i + 2 - n
        lap = (-u1[im2] + 16.0 * u1[im1] - 30.0 * u1[i]
               + 16.0 * u1[ip1] - u1[ip2]) * inv12h2
        out[i] = lap - Veff[i] * u1[i]
        if nc > 0:
            out[i] -= _fval(u1[i], fc, nc)


def step_batch(double[::1] u1, double[::1] u2,
               const double[::1] Veff, const double[::1] fcoeffs,
               double h, double dt, Py_ssize_t nsteps,
               const double[::1] damping):
    """Advance nsteps leapfrog steps in place.

    damping is exp(-dt sigma(x)) applied to both components after each step;
    pass an empty array to disable the absorbing layer.
    """
    cdef Py_ssize_t n = u1.shape[0]
    cdef Py_ssize_t nc = fcoeffs.shape[0]
    cdef bint damped = damping.shape[0] == n
    cdef double inv12h2 = 1.0 / (12.0 * h * h)
    cdef double half = 0.5 * dt
    cdef cnp.ndarray[double, ndim=1] work = np.empty(n, dtype=np.float64)
    cdef double[::1] acc = work
    cdef Py_ssize_t s, i

    with nogil:
        for s in range(nsteps):
            _accel(u1, Veff, fcoeffs, nc, inv12h2, acc)
            for i in range(n):
                u2[i] += half * acc[i]
                u1[i] += dt * u2[i]
            _accel(u1, Veff, fcoeffs, nc, inv12h2, acc)
            for i in range(n):
                u2[i] += half * acc[i]
            if damped:
                for i in range(n):
                    u1[i] *= damping[i]
                    u2[i] *= damping[i]
    return 0
