"""Pure Python / NumPy implementation of the numerical kernels.

Mirrors the compiled ``_kernels`` extension function for function. Batch
routines are vectorized over the leading axis so the fallback stays usable
for the randomized sweeps in the test-suite.
"""
import math

import numpy as np

BACKEND = "python"

_MAX_SWEEPS = 100
_MAX_ROOT_ITERS = 400


def _rotation(app, aqq, apq):
    theta = (aqq - app) / (2.0 * apq)
    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    return t, c, t * c


def jacobi_eigh(a):
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Returns ``(w, v)`` with ascending eigenvalues ``w`` and orthonormal
    eigenvectors in the columns of ``v``.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    scale = float(np.sqrt(np.sum(a * a)))
    for _ in range(_MAX_SWEEPS):
        off = float(np.sum(np.triu(a, 1) ** 2))
        if off == 0.0 or math.sqrt(off) <= 1e-17 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                t, c, s = _rotation(a[p, p], a[q, q], apq)
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * colq
                a[:, q] = s * colp + c * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - s * rowq
                a[q, :] = s * rowp + c * rowq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigvalsh(a):
    """Ascending eigenvalues of one symmetric matrix.

    LAPACK here: a per-matrix Jacobi loop in Python costs milliseconds.
    """
    return np.linalg.eigvalsh(np.asarray(a, dtype=float))


def jacobi_eigh_batch(a):
    """Jacobi sweeps applied to a stack ``(m, n, n)`` of symmetric matrices.

    Returns eigenvalues only, shape ``(m, n)``, ascending per row.
    """
    a = np.array(a, dtype=float, copy=True)
    m, n, _ = a.shape
    scale = np.sqrt(np.sum(a * a, axis=(1, 2)))
    iu = np.triu_indices(n, 1)
    for _ in range(_MAX_SWEEPS):
        off = np.sqrt(np.sum(a[:, iu[0], iu[1]] ** 2, axis=1))
        if np.all((off == 0.0) | (off <= 1e-17 * scale)):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                active = apq != 0.0
                if not np.any(active):
                    continue
                safe = np.where(active, apq, 1.0)
                with np.errstate(over="ignore"):
                    # a tiny apq can overflow theta or theta^2; t then correctly tends to 0
                    theta = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
                    t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(theta == 0.0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                colp = a[:, :, p].copy()
                colq = a[:, :, q].copy()
                a[:, :, p] = c[:, None] * colp - s[:, None] * colq
                a[:, :, q] = s[:, None] * colp + c[:, None] * colq
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :].copy()
                a[:, p, :] = c[:, None] * rowp - s[:, None] * rowq
                a[:, q, :] = s[:, None] * rowp + c[:, None] * rowq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
    w = np.diagonal(a, axis1=1, axis2=2).copy()
    w.sort(axis=1)
    return w


def elem_sym(w):
    """Elementary symmetric functions chi_0..chi_n of the values ``w``."""
    w = np.asarray(w, dtype=float)
    chi = np.zeros(w.shape[0] + 1)
    chi[0] = 1.0
    for k, lam in enumerate(w, start=1):
        chi[1:k + 1] = chi[1:k + 1] + lam * chi[0:k]
    return chi


def sl_angle(w, r):
    return float(sum(math.atan(r * lam) for lam in np.asarray(w, dtype=float)))


def sl_angle_batch(w, r):
    w = np.asarray(w, dtype=float)
    r = np.asarray(r, dtype=float)
    return np.sum(np.arctan(r[:, None] * w), axis=1)


def invert_angle(w, theta):
    """Root ``r > 0`` of ``sum(atan(r*w)) = theta`` for positive ``w``.

    Bracket growth, then Newton steps safeguarded by bisection.
    """
    w = [float(x) for x in np.asarray(w, dtype=float)]
    lo, hi = 0.0, 1.0 / max(w)
    while sum(math.atan(hi * x) for x in w) < theta:
        lo = hi
        hi *= 2.0
    r = 0.5 * (lo + hi)
    tol = 4e-16 * max(1.0, abs(theta)) * len(w)
    for _ in range(_MAX_ROOT_ITERS):
        f = sum(math.atan(r * x) for x in w) - theta
        if abs(f) <= tol:
            return r
        if f < 0.0:
            lo = r
        else:
            hi = r
        df = sum(x / (1.0 + (r * x) ** 2) for x in w)
        step = f / df if df > 0.0 else 0.0
        new = r - step
        if not (lo < new < hi) or df <= 0.0:
            new = 0.5 * (lo + hi)
        if new == r or hi - lo <= 2e-16 * hi:
            return new
        r = new
    return r


def invert_angle_batch(w, theta):
    """Vectorized :func:`invert_angle` over rows of ``w``."""
    w = np.asarray(w, dtype=float)
    theta = np.asarray(theta, dtype=float)
    m, n = w.shape
    lo = np.zeros(m)
    hi = 1.0 / w.max(axis=1)
    for _ in range(2100):
        short = np.sum(np.arctan(hi[:, None] * w), axis=1) < theta
        if not np.any(short):
            break
        lo = np.where(short, hi, lo)
        hi = np.where(short, 2.0 * hi, hi)
    r = 0.5 * (lo + hi)
    tol = 4e-16 * np.maximum(1.0, np.abs(theta)) * n
    done = np.zeros(m, dtype=bool)
    for _ in range(_MAX_ROOT_ITERS):
        rw = r[:, None] * w
        f = np.sum(np.arctan(rw), axis=1) - theta
        done |= np.abs(f) <= tol
        if np.all(done):
            break
        lo = np.where(~done & (f < 0.0), r, lo)
        hi = np.where(~done & (f > 0.0), r, hi)
        df = np.sum(w / (1.0 + rw * rw), axis=1)
        new = r - f / df
        bad = ~((lo < new) & (new < hi))
        new = np.where(bad, 0.5 * (lo + hi), new)
        stalled = (new == r) | (hi - lo <= 2e-16 * hi)
        r = np.where(done, r, new)
        done |= stalled
    return r
