# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementation of the hot kernels.

Same calling convention as :mod:`coagfrag._core_np`; plain nested loops over
the precomputed tables.  The mass-flux accumulation uses Neumaier
compensation instead of ``math.fsum``.
"""

from libc.math cimport fabs

BACKEND_NAME = "cython"


def rhs_core(const double[::1] u, const double[::1] g, const double[::1] d,
             const double[::1] theta, const double[:, ::1] frag_gain,
             const double[:, ::1] k, double[::1] out):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i, j, l
    cdef double acc, s, pen, t, cl
    for i in range(n):
        acc = -theta[i] * u[i]
        if i > 0:
            acc += g[i - 1] * u[i - 1]
        if i < n - 1:
            acc += d[i + 1] * u[i + 1]
        for j in range(i + 1, n):
            acc += frag_gain[i, j] * u[j]
        if u[i] != 0.0:
            s = 0.0
            for j in range(n):
                s += k[i, j] * u[j]
            acc -= u[i] * s
        out[i] = acc
    # coagulation gain, scattered by source pair so rows of k stream in order
    for l in range(n - 1):
        cl = 0.5 * u[l]
        if cl == 0.0:
            continue
        for j in range(n - 1 - l):
            out[l + 1 + j] += cl * k[l, j] * u[j]
    pen = 0.0
    for j in range(n):
        if u[j] == 0.0:
            continue
        t = 0.0
        for i in range(n - 1 - j, n):
            t += k[j, i] * u[i]  # k is symmetric; walk its rows
        pen += (j + 1) * u[j] * t
    out[n - 1] += pen / n


def jacobian_core(const double[::1] u, const double[:, ::1] jlin,
                  const double[:, ::1] k, double[:, ::1] out):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i, j, m
    cdef double s, t, r
    for i in range(n):
        for j in range(n):
            out[i, j] = jlin[i, j]
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += k[i, j] * u[j]
        for m in range(n):
            out[i, m] -= u[i] * k[i, m]
        out[i, i] -= s
        for m in range(i):
            out[i, m] += k[i - m - 1, m] * u[i - m - 1]
    for m in range(n):
        t = 0.0
        for i in range(n - 1 - m, n):
            t += k[i, m] * u[i]
        r = 0.0
        for j in range(n - 1 - m, n):
            r += (j + 1) * k[m, j] * u[j]
        out[n - 1, m] += ((m + 1) * t + r) / n


cdef inline void _acc(double term, double* s, double* comp) noexcept:
    cdef double t = s[0] + term
    if fabs(s[0]) >= fabs(term):
        comp[0] += (s[0] - t) + term
    else:
        comp[0] += (term - t) + s[0]
    s[0] = t


def mass_flux_core(const double[::1] u, const double[::1] g, const double[::1] d,
                   const double[::1] s_, const double[::1] a,
                   const double[::1] mass_defect):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i
    cdef double total = 0.0, comp = 0.0
    for i in range(n - 1):
        _acc(g[i] * u[i], &total, &comp)
    _acc(-(<double> n) * g[n - 1] * u[n - 1], &total, &comp)
    for i in range(n):
        _acc(-d[i] * u[i], &total, &comp)
        _acc(-(i + 1.0) * s_[i] * u[i], &total, &comp)
        _acc(a[i] * u[i] * mass_defect[i], &total, &comp)
    return total + comp
