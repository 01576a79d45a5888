"""Implicit-shift QL iteration for real symmetric tridiagonal matrices.

The kernel is compiled with numba; the wrapper in :mod:`spinline.spectral`
handles sorting, sign fixing and error reporting.
"""

import math

import numba
import numpy as np

EPS = np.finfo(float).eps


@numba.njit(cache=True, nogil=True)
def tql_implicit(d, e, z, tol, max_iter):
    """Diagonalise in place.

    ``d`` (length n) holds the diagonal, ``e`` (length n) the off-diagonal in
    ``e[0..n-2]``. ``z`` must enter as the identity; on exit its columns are
    the eigenvectors and ``d`` the (unsorted) eigenvalues. Returns the number
    of iterations used, or -1 when ``max_iter`` is exhausted.
    """
    n = d.size
    anorm = 0.0
    for i in range(n):
        anorm = max(anorm, abs(d[i]) + abs(e[i]))
    floor = EPS * anorm
    total = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                # split when the coupling is negligible next to its diagonal
                # neighbours; the norm floor catches clusters around zero
                if abs(e[m]) <= tol * dd or abs(e[m]) <= floor:
                    break
                m += 1
            if m == l:
                break
            total += 1
            if total > max_iter:
                return -1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    f = z[k, i + 1]
                    z[k, i + 1] = s * z[k, i] + c * f
                    z[k, i] = c * z[k, i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return total
