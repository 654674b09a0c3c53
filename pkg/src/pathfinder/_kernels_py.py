"""Pure-Python (numpy) versions of the dense kernels.

Every function here has a twin with the same signature in ``_kernels.pyx``.
Inputs are float64 arrays; the matrix arguments are copied, never modified.
Failure is reported through an integer ``info`` (-1 means success) so both
backends behave identically; the wrappers in :mod:`pathfinder.numerics`
turn it into exceptions.
"""
import math

import numpy as np

ALPHA_BP = (1.0 + math.sqrt(17.0)) / 8.0


def lu_factor(a, tol):
    """LU with partial pivoting. Returns (lu, piv, info)."""
    lu = np.array(a, dtype=np.float64, copy=True)
    n = lu.shape[0]
    piv = np.arange(n, dtype=np.intp)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= tol:
            return lu, piv, k
        if p != k:
            lu[[k, p], :] = lu[[p, k], :]
            piv[k], piv[p] = piv[p], piv[k]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, piv, -1


def lu_solve(lu, piv, b):
    n = lu.shape[0]
    x = np.array(b, dtype=np.float64)[piv]
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x


def cholesky(a):
    """Lower Cholesky factor. Returns (L, info)."""
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    L = np.zeros_like(a)
    for j in range(n):
        s = a[j, j] - L[j, :j] @ L[j, :j]
        if not s > 0.0:
            return L, j
        L[j, j] = math.sqrt(s)
        L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L, -1


def forward_sub(L, b):
    """Solve L x = b for lower-triangular L; b may be a matrix."""
    x = np.array(b, dtype=np.float64, copy=True)
    n = L.shape[0]
    for i in range(n):
        x[i] = (x[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def back_sub_t(L, b):
    """Solve L^T x = b for lower-triangular L; b may be a matrix."""
    x = np.array(b, dtype=np.float64, copy=True)
    n = L.shape[0]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - L[i + 1:, i] @ x[i + 1:]) / L[i, i]
    return x


def _swap_sym(s, l, perm, i, j):
    if i == j:
        return
    s[[i, j], :] = s[[j, i], :]
    s[:, [i, j]] = s[:, [j, i]]
    l[[i, j], :] = l[[j, i], :]
    perm[i], perm[j] = perm[j], perm[i]


def ldlt(a, tol):
    """Symmetric indefinite LDL^T with Bunch-Parlett complete pivoting.

    Returns (L, d, e, perm) with P A P^T = L D L^T, where D has diagonal
    ``d`` and sub-diagonal ``e`` (nonzero only inside 2x2 blocks).
    Columns of the permuted matrix are ``perm``. Pivots with magnitude
    below ``tol`` are left as zeros and elimination skips them.
    """
    s = np.array(a, dtype=np.float64, copy=True)
    n = s.shape[0]
    L = np.zeros((n, n))
    d = np.zeros(n)
    e = np.zeros(max(n - 1, 0))
    perm = np.arange(n, dtype=np.intp)
    k = 0
    while k < n:
        sub = np.abs(s[k:, k:])
        mu0 = float(sub.max())
        if mu0 <= tol:
            for i in range(k, n):
                L[i, i] = 1.0
            break
        diag = np.diag(sub)
        r = int(np.argmax(diag))
        if diag[r] >= ALPHA_BP * mu0 or n - k == 1:
            _swap_sym(s, L, perm, k, k + r)
            piv = s[k, k]
            L[k, k] = 1.0
            d[k] = piv
            if abs(piv) > tol:
                col = s[k + 1:, k] / piv
                L[k + 1:, k] = col
                s[k + 1:, k + 1:] -= piv * np.outer(col, col)
            k += 1
        else:
            off = sub.copy()
            np.fill_diagonal(off, -1.0)
            i, j = np.unravel_index(int(np.argmax(off)), off.shape)
            i, j = (int(i), int(j)) if i < j else (int(j), int(i))
            _swap_sym(s, L, perm, k, k + i)
            _swap_sym(s, L, perm, k + 1, k + j)
            E = s[k:k + 2, k:k + 2].copy()
            L[k, k] = L[k + 1, k + 1] = 1.0
            d[k], d[k + 1], e[k] = E[0, 0], E[1, 1], E[1, 0]
            C = s[k + 2:, k:k + 2]
            det = E[0, 0] * E[1, 1] - E[1, 0] * E[1, 0]
            Einv = np.array([[E[1, 1], -E[1, 0]], [-E[1, 0], E[0, 0]]]) / det
            W = C @ Einv
            L[k + 2:, k:k + 2] = W
            s[k + 2:, k + 2:] -= W @ C.T
            k += 2
    return L, d, e, perm


def jacobi_eigh(a, rtol, max_sweeps):
    """Cyclic Jacobi for a symmetric matrix. Returns (w, V, sweeps, converged)."""
    A = np.array(a, dtype=np.float64, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    target = rtol * math.sqrt(float(np.sum(A * A)))
    sweeps = 0
    while True:
        off_diag = A - np.diag(np.diag(A))
        off = math.sqrt(float(np.sum(off_diag * off_diag)))
        if off <= target:
            return np.diag(A).copy(), V, sweeps, True
        if sweeps >= max_sweeps:
            return np.diag(A).copy(), V, sweeps, False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                sn = t * c
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - sn * aq
                A[:, q] = sn * ap + c * aq
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - sn * rq
                A[q, :] = sn * rp + c * rq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - sn * vq
                V[:, q] = sn * vp + c * vq
        sweeps += 1


def find_span(knots, p, n_basis, x):
    """Index of the knot span containing x (right end maps to the last span)."""
    if x >= knots[n_basis]:
        return n_basis - 1
    lo, hi = p, n_basis
    mid = (lo + hi) // 2
    while x < knots[mid] or x >= knots[mid + 1]:
        if x < knots[mid]:
            hi = mid
        else:
            lo = mid
        mid = (lo + hi) // 2
    return mid


def basis_ders(knots, p, span, x, nder):
    """Nonzero B-spline values and derivatives on ``span`` (Cox-de Boor).

    Returns an (nder+1, p+1) array; row k holds the k-th derivatives of
    the functions span-p .. span.
    """
    ndu = np.zeros((p + 1, p + 1))
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
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
    ders = np.zeros((nder + 1, p + 1))
    ders[0, :] = ndu[:, p]
    a = np.zeros((2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
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
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                dk += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                dk += a[s2, k] * ndu[r, pk]
            ders[k, r] = dk
            s1, s2 = s2, s1
    fac = float(p)
    for k in range(1, nder + 1):
        ders[k, :] *= fac
        fac *= p - k
    return ders
