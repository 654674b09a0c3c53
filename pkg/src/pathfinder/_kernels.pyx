# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dense kernels. Same signatures and results as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, copysign

cnp.import_array()

cdef double ALPHA_BP = (1.0 + sqrt(17.0)) / 8.0


def lu_factor(a, double tol):
    cdef cnp.ndarray[double, ndim=2] lu_arr = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] lu = lu_arr
    cdef Py_ssize_t n = lu.shape[0]
    cdef cnp.ndarray[cnp.intp_t, ndim=1] piv_arr = np.arange(n, dtype=np.intp)
    cdef cnp.intp_t[::1] piv = piv_arr
    cdef Py_ssize_t i, j, k, p
    cdef double big, tmp, f
    cdef cnp.intp_t ti
    with nogil:
        for k in range(n):
            p = k
            big = fabs(lu[k, k])
            for i in range(k + 1, n):
                if fabs(lu[i, k]) > big:
                    big = fabs(lu[i, k])
                    p = i
            if big <= tol:
                with gil:
                    return lu_arr, piv_arr, k
            if p != k:
                for j in range(n):
                    tmp = lu[k, j]
                    lu[k, j] = lu[p, j]
                    lu[p, j] = tmp
                ti = piv[k]
                piv[k] = piv[p]
                piv[p] = ti
            for i in range(k + 1, n):
                f = lu[i, k] / lu[k, k]
                lu[i, k] = f
                for j in range(k + 1, n):
                    lu[i, j] -= f * lu[k, j]
    return lu_arr, piv_arr, -1


def lu_solve(lu_in, piv_in, b):
    cdef double[:, ::1] lu = np.ascontiguousarray(lu_in, dtype=np.float64)
    cdef cnp.intp_t[::1] piv = np.ascontiguousarray(piv_in, dtype=np.intp)
    cdef Py_ssize_t n = lu.shape[0]
    cdef cnp.ndarray[double, ndim=1] x_arr = np.array(b, dtype=np.float64)[np.asarray(piv)]
    cdef double[::1] x = x_arr
    cdef Py_ssize_t i, j
    cdef double s
    with nogil:
        for i in range(1, n):
            s = x[i]
            for j in range(i):
                s -= lu[i, j] * x[j]
            x[i] = s
        for i in range(n - 1, -1, -1):
            s = x[i]
            for j in range(i + 1, n):
                s -= lu[i, j] * x[j]
            x[i] = s / lu[i, i]
    return x_arr


def cholesky(a):
    cdef double[:, ::1] A = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t n = A.shape[0]
    cdef cnp.ndarray[double, ndim=2] L_arr = np.zeros((n, n))
    cdef double[:, ::1] L = L_arr
    cdef Py_ssize_t i, j, k
    cdef double s
    with nogil:
        for j in range(n):
            s = A[j, j]
            for k in range(j):
                s -= L[j, k] * L[j, k]
            if not s > 0.0:
                with gil:
                    return L_arr, j
            L[j, j] = sqrt(s)
            for i in range(j + 1, n):
                s = A[i, j]
                for k in range(j):
                    s -= L[i, k] * L[j, k]
                L[i, j] = s / L[j, j]
    return L_arr, -1


def forward_sub(L_in, b):
    cdef double[:, ::1] L = np.ascontiguousarray(L_in, dtype=np.float64)
    x_arr = np.array(b, dtype=np.float64, copy=True)
    vec = x_arr.ndim == 1
    if vec:
        x_arr = x_arr[:, None]
    x_arr = np.ascontiguousarray(x_arr)
    cdef double[:, ::1] x = x_arr
    cdef Py_ssize_t n = L.shape[0], m = x.shape[1]
    cdef Py_ssize_t i, j, c
    cdef double s
    with nogil:
        for c in range(m):
            for i in range(n):
                s = x[i, c]
                for j in range(i):
                    s -= L[i, j] * x[j, c]
                x[i, c] = s / L[i, i]
    return x_arr[:, 0] if vec else x_arr


def back_sub_t(L_in, b):
    cdef double[:, ::1] L = np.ascontiguousarray(L_in, dtype=np.float64)
    x_arr = np.array(b, dtype=np.float64, copy=True)
    vec = x_arr.ndim == 1
    if vec:
        x_arr = x_arr[:, None]
    x_arr = np.ascontiguousarray(x_arr)
    cdef double[:, ::1] x = x_arr
    cdef Py_ssize_t n = L.shape[0], m = x.shape[1]
    cdef Py_ssize_t i, j, c
    cdef double s
    with nogil:
        for c in range(m):
            for i in range(n - 1, -1, -1):
                s = x[i, c]
                for j in range(i + 1, n):
                    s -= L[j, i] * x[j, c]
                x[i, c] = s / L[i, i]
    return x_arr[:, 0] if vec else x_arr


cdef void _swap_sym(double[:, ::1] s, double[:, ::1] L, cnp.intp_t[::1] perm,
                    Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t n = s.shape[0], c
    cdef double tmp
    cdef cnp.intp_t ti
    if i == j:
        return
    for c in range(n):
        tmp = s[i, c]
        s[i, c] = s[j, c]
        s[j, c] = tmp
    for c in range(n):
        tmp = s[c, i]
        s[c, i] = s[c, j]
        s[c, j] = tmp
    for c in range(n):
        tmp = L[i, c]
        L[i, c] = L[j, c]
        L[j, c] = tmp
    ti = perm[i]
    perm[i] = perm[j]
    perm[j] = ti


def ldlt(a, double tol):
    cdef double[:, ::1] s = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = s.shape[0]
    cdef cnp.ndarray[double, ndim=2] L_arr = np.zeros((n, n))
    cdef cnp.ndarray[double, ndim=1] d_arr = np.zeros(n)
    cdef cnp.ndarray[double, ndim=1] e_arr = np.zeros(max(n - 1, 0))
    cdef cnp.ndarray[cnp.intp_t, ndim=1] perm_arr = np.arange(n, dtype=np.intp)
    cdef double[:, ::1] L = L_arr
    cdef double[::1] d = d_arr
    cdef double[::1] e = e_arr
    cdef cnp.intp_t[::1] perm = perm_arr
    cdef Py_ssize_t k = 0, i, j, r, bi, bj
    cdef double mu0, mu1, v, piv, e00, e11, e10, det, w0, w1
    with nogil:
        while k < n:
            mu0 = 0.0
            mu1 = -1.0
            r = k
            bi = k
            bj = k + 1
            for i in range(k, n):
                v = fabs(s[i, i])
                if v > mu1:
                    mu1 = v
                    r = i
                if v > mu0:
                    mu0 = v
            v = -1.0
            for i in range(k, n):
                for j in range(i + 1, n):
                    if fabs(s[i, j]) > v:
                        v = fabs(s[i, j])
                        bi = i
                        bj = j
            if v > mu0:
                mu0 = v
            if mu0 <= tol:
                for i in range(k, n):
                    L[i, i] = 1.0
                break
            if mu1 >= ALPHA_BP * mu0 or n - k == 1:
                _swap_sym(s, L, perm, k, r)
                piv = s[k, k]
                L[k, k] = 1.0
                d[k] = piv
                if fabs(piv) > tol:
                    for i in range(k + 1, n):
                        L[i, k] = s[i, k] / piv
                    for i in range(k + 1, n):
                        for j in range(k + 1, n):
                            s[i, j] -= piv * L[i, k] * L[j, k]
                k += 1
            else:
                _swap_sym(s, L, perm, k, bi)
                _swap_sym(s, L, perm, k + 1, bj)
                e00 = s[k, k]
                e11 = s[k + 1, k + 1]
                e10 = s[k + 1, k]
                L[k, k] = 1.0
                L[k + 1, k + 1] = 1.0
                d[k] = e00
                d[k + 1] = e11
                e[k] = e10
                det = e00 * e11 - e10 * e10
                for i in range(k + 2, n):
                    w0 = (s[i, k] * e11 - s[i, k + 1] * e10) / det
                    w1 = (s[i, k + 1] * e00 - s[i, k] * e10) / det
                    L[i, k] = w0
                    L[i, k + 1] = w1
                for i in range(k + 2, n):
                    for j in range(k + 2, n):
                        s[i, j] -= L[i, k] * s[j, k] + L[i, k + 1] * s[j, k + 1]
                k += 2
    return L_arr, d_arr, e_arr, perm_arr


def jacobi_eigh(a, double rtol, int max_sweeps):
    cdef double[:, ::1] A = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = A.shape[0]
    cdef cnp.ndarray[double, ndim=2] V_arr = np.eye(n)
    cdef double[:, ::1] V = V_arr
    cdef Py_ssize_t p, q, i
    cdef int sweeps = 0
    cdef double fro = 0.0, off, apq, tau, t, c, sn, x, y, target
    cdef bint converged = False
    with nogil:
        for p in range(n):
            for q in range(n):
                fro += A[p, q] * A[p, q]
        target = rtol * sqrt(fro)
        while True:
            off = 0.0
            for p in range(n):
                for q in range(n):
                    if p != q:
                        off += A[p, q] * A[p, q]
            if sqrt(off) <= target:
                converged = True
                break
            if sweeps >= max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p, q]
                    if apq == 0.0:
                        continue
                    tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                    if fabs(tau) > 1e150:
                        t = 0.5 / tau
                    else:
                        t = copysign(1.0, tau) / (fabs(tau) + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    sn = t * c
                    for i in range(n):
                        x = A[i, p]
                        y = A[i, q]
                        A[i, p] = c * x - sn * y
                        A[i, q] = sn * x + c * y
                    for i in range(n):
                        x = A[p, i]
                        y = A[q, i]
                        A[p, i] = c * x - sn * y
                        A[q, i] = sn * x + c * y
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    for i in range(n):
                        x = V[i, p]
                        y = V[i, q]
                        V[i, p] = c * x - sn * y
                        V[i, q] = sn * x + c * y
            sweeps += 1
    w = np.array([A[i, i] for i in range(n)], dtype=np.float64)
    return w, V_arr, sweeps, bool(converged)


def find_span(knots_in, int p, int n_basis, double x):
    cdef double[::1] knots = np.ascontiguousarray(knots_in, dtype=np.float64)
    cdef int lo, hi, mid
    if x >= knots[n_basis]:
        return n_basis - 1
    lo = p
    hi = n_basis
    mid = (lo + hi) // 2
    while x < knots[mid] or x >= knots[mid + 1]:
        if x < knots[mid]:
            hi = mid
        else:
            lo = mid
        mid = (lo + hi) // 2
    return mid


def basis_ders(knots_in, int p, int span, double x, int nder):
    cdef double[::1] knots = np.ascontiguousarray(knots_in, dtype=np.float64)
    cdef double[:, ::1] ndu = np.zeros((p + 1, p + 1))
    cdef double[::1] left = np.zeros(p + 1)
    cdef double[::1] right = np.zeros(p + 1)
    cdef cnp.ndarray[double, ndim=2] ders_arr = np.zeros((nder + 1, p + 1))
    cdef double[:, ::1] ders = ders_arr
    cdef double[:, ::1] a = np.zeros((2, p + 1))
    cdef int j, r, k, s1, s2, rk, pk, j1, j2, jj
    cdef double saved, temp, dk, fac
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = x - knots[span + 1 - j]
        right[j] = knots[span + j] - x
        saved = 0.0
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved
    for j in range(p + 1):
        ders[0, j] = ndu[j, p]
    for r in range(p + 1):
        s1 = 0
        s2 = 1
        a[0, 0] = 1.0
        for k in range(1, nder + 1):
            dk = 0.0
            rk = r - k
            pk = p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                dk = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for jj in range(j1, j2 + 1):
                a[s2, jj] = (a[s1, jj] - a[s1, jj - 1]) / ndu[pk + 1, rk + jj]
                dk += a[s2, jj] * ndu[rk + jj, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                dk += a[s2, k] * ndu[r, pk]
            ders[k, r] = dk
            s1, s2 = s2, s1
    fac = p
    for k in range(1, nder + 1):
        for j in range(p + 1):
            ders[k, j] *= fac
        fac *= p - k
    return ders_arr
