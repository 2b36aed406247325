# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled line-search kernel: largest eigenvalue of the filtered Gram
matrix per k_bar grid point, via LAPACK dsyevr."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt
from scipy.linalg.cython_lapack cimport dsyevr

cnp.import_array()


def filtered_spectral_norms(gram, lam, k_grid, double gamma):
    """sqrt(lambda_max(diag(c_k) G diag(c_k))) for every k_bar in k_grid."""
    cdef double[::1, :] g = np.asfortranarray(gram, dtype=np.float64)
    cdef double[::1] lams = np.ascontiguousarray(lam, dtype=np.float64)
    cdef double[::1] ks = np.ascontiguousarray(np.atleast_1d(k_grid), dtype=np.float64)
    cdef int n = g.shape[0]
    cdef int p = ks.shape[0]

    out_arr = np.empty(p, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] coef = np.empty(n, dtype=np.float64)
    cdef double[::1, :] a = np.empty((n, n), dtype=np.float64, order="F")
    cdef double[::1] w = np.empty(n, dtype=np.float64)
    cdef double[::1, :] z = np.empty((1, 1), dtype=np.float64, order="F")
    cdef int[::1] isuppz = np.empty(2 * n, dtype=np.intc)
    cdef int lwork = 26 * n
    cdef int liwork = 10 * n
    cdef double[::1] work = np.empty(lwork, dtype=np.float64)
    cdef int[::1] iwork = np.empty(liwork, dtype=np.intc)

    cdef char jobz = b"N"
    cdef char rng = b"I"
    cdef char uplo = b"L"
    cdef int il = n, iu = n, m = 0, info = 0, ldz = 1
    cdef double vl = 0.0, vu = 0.0, abstol = 0.0
    cdef double kb, top
    cdef Py_ssize_t t, i, j

    for t in range(p):
        kb = ks[t]
        for i in range(n):
            coef[i] = 1.0 / sqrt(1.0 + gamma * (kb + lams[i]) * (kb + lams[i]))
        for j in range(n):
            for i in range(n):
                a[i, j] = coef[i] * coef[j] * g[i, j]
        dsyevr(&jobz, &rng, &uplo, &n, &a[0, 0], &n, &vl, &vu, &il, &iu,
               &abstol, &m, &w[0], &z[0, 0], &ldz, &isuppz[0],
               &work[0], &lwork, &iwork[0], &liwork, &info)
        if info != 0:
            raise RuntimeError(f"dsyevr failed with info={info}")
        top = w[0]
        out[t] = sqrt(top) if top > 0.0 else 0.0
    return out_arr
