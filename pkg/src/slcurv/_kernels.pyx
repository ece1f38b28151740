# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels (Jacobi eigen-solver, arctangent sums, root inversion).

Same public functions and return conventions as ``_kernels_py``.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport atan, fabs, sqrt

cnp.import_array()

BACKEND = "cython"

DEF MAX_SWEEPS = 100
DEF MAX_ROOT_ITERS = 400


cdef void _jacobi(double[:, ::1] a, double[:, ::1] v, bint want_vectors) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k, sweep
    cdef double off, scale = 0.0, apq, theta, t, c, s, x, y
    for p in range(n):
        for q in range(n):
            scale += a[p, q] * a[p, q]
            if want_vectors:
                v[p, q] = 1.0 if p == q else 0.0
    scale = sqrt(scale)
    for sweep in range(MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if off == 0.0 or sqrt(off) <= 1e-17 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * y
                    a[k, q] = s * x + c * y
                for k in range(n):
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * y
                    a[q, k] = s * x + c * y
                a[p, q] = 0.0
                a[q, p] = 0.0
                if want_vectors:
                    for k in range(n):
                        x = v[k, p]
                        y = v[k, q]
                        v[k, p] = c * x - s * y
                        v[k, q] = s * x + c * y


def jacobi_eigh(a):
    cdef double[:, ::1] work = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = work.shape[0]
    vecs = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] v = vecs
    with nogil:
        _jacobi(work, v, True)
    w = np.diagonal(np.asarray(work)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], vecs[:, order]


def eigvalsh(a):
    cdef double[:, ::1] work = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] dummy = np.empty((1, 1), dtype=np.float64)
    with nogil:
        _jacobi(work, dummy, False)
    w = np.diagonal(np.asarray(work)).copy()
    w.sort()
    return w


def jacobi_eigh_batch(a):
    arr = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t m = arr.shape[0], n = arr.shape[1], i, k
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, :, ::1] work = arr
    cdef double[:, ::1] res = out
    cdef double[:, ::1] dummy = np.empty((1, 1), dtype=np.float64)
    with nogil:
        for i in range(m):
            _jacobi(work[i], dummy, False)
            for k in range(n):
                res[i, k] = work[i, k, k]
    out.sort(axis=1)
    return out


def elem_sym(w):
    cdef const double[::1] lam = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t n = lam.shape[0], k, j
    chi_arr = np.zeros(n + 1, dtype=np.float64)
    cdef double[::1] chi = chi_arr
    chi[0] = 1.0
    for k in range(n):
        for j in range(k + 1, 0, -1):
            chi[j] += lam[k] * chi[j - 1]
    return chi_arr


cdef inline double _angle(const double* w, Py_ssize_t n, double r) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        acc += atan(r * w[i])
    return acc


cdef double _invert(const double* w, Py_ssize_t n, double theta) noexcept nogil:
    cdef double wmax = w[0], lo = 0.0, hi, r, f, df, new, rw, tol
    cdef Py_ssize_t i, it
    for i in range(1, n):
        if w[i] > wmax:
            wmax = w[i]
    hi = 1.0 / wmax
    while _angle(w, n, hi) < theta:
        lo = hi
        hi *= 2.0
    r = 0.5 * (lo + hi)
    tol = 4e-16 * (fabs(theta) if fabs(theta) > 1.0 else 1.0) * n
    for it in range(MAX_ROOT_ITERS):
        f = _angle(w, n, r) - theta
        if fabs(f) <= tol:
            return r
        if f < 0.0:
            lo = r
        else:
            hi = r
        df = 0.0
        for i in range(n):
            rw = r * w[i]
            df += w[i] / (1.0 + rw * rw)
        new = r - f / df if df > 0.0 else 0.5 * (lo + hi)
        if not (lo < new < hi):
            new = 0.5 * (lo + hi)
        if new == r or hi - lo <= 2e-16 * hi:
            return new
        r = new
    return r


def sl_angle(w, double r):
    cdef const double[::1] lam = np.ascontiguousarray(w, dtype=np.float64)
    return _angle(&lam[0], lam.shape[0], r)


def sl_angle_batch(w, r):
    cdef const double[:, ::1] lam = np.ascontiguousarray(w, dtype=np.float64)
    cdef const double[::1] rr = np.ascontiguousarray(r, dtype=np.float64)
    cdef Py_ssize_t m = lam.shape[0], n = lam.shape[1], i
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] res = out
    with nogil:
        for i in range(m):
            res[i] = _angle(&lam[i, 0], n, rr[i])
    return out


def invert_angle(w, double theta):
    cdef const double[::1] lam = np.ascontiguousarray(w, dtype=np.float64)
    return _invert(&lam[0], lam.shape[0], theta)


def invert_angle_batch(w, theta):
    cdef const double[:, ::1] lam = np.ascontiguousarray(w, dtype=np.float64)
    cdef const double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t m = lam.shape[0], n = lam.shape[1], i
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] res = out
    with nogil:
        for i in range(m):
            res[i] = _invert(&lam[i, 0], n, th[i])
    return out
