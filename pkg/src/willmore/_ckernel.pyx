# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Picard kernel: assemble the folded periodic band and call dgbsv.

Mirrors :func:`willmore._pykernel.assemble_picard_system` row for row.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs
from scipy.linalg.cython_lapack cimport dgbsv

from .grid import DegenerateGeometryError
from .linsys import PIVOT_RTOL, SingularSystemError

cnp.import_array()

DEF NV = 4
DEF KL = 11
DEF KU = 11
DEF LDAB = 2 * KL + KU + 1
DEF DIAG_ROW = KL + KU


cdef inline void put(double[:, ::1] ab, Py_ssize_t r, Py_ssize_t c, double v) noexcept nogil:
    # column-major band storage: column c is ab[c, :]
    ab[c, DIAG_ROW + r - c] += v


def picard_solve(const double[:, ::1] X, const double[::1] kappa, const double[:, ::1] S,
                 double alpha0, double dt, const double[::1] ta, const double[::1] tb):
    cdef Py_ssize_t M = X.shape[0]
    cdef int n = <int>(NV * M)
    cdef int kl = KL, ku = KU, nrhs = 1, ldab = LDAB, ldb = n, info = 0
    cdef double h = 1.0 / M
    cdef double ih2 = 1.0 / (h * h)
    cdef double c0 = alpha0 / dt

    ab_arr = np.zeros((n, LDAB))
    b_arr = np.zeros(n)
    ipiv_arr = np.zeros(n, dtype=np.intc)
    pos_arr = np.empty(M, dtype=np.intp)
    cdef double[:, ::1] ab = ab_arr
    cdef double[::1] b = b_arr
    cdef int[::1] ipiv = ipiv_arr
    cdef Py_ssize_t[::1] pos = pos_arr

    cdef Py_ssize_t i, ip, im, j, q, pi, pn
    cdef double dx, dy, g, g2, tx, ty, nx, ny, dk, txx, txy, tyy, cx, cy, ex, ey, kv
    cdef Py_ssize_t nbs[2]
    cdef double degenerate = 0.0

    with nogil:
        for i in range(M):
            if 2 * i < M:
                pos[i] = NV * (2 * i)
            else:
                pos[i] = NV * (2 * (M - 1 - i) + 1)

        for i in range(M):
            ip = i + 1 if i + 1 < M else 0
            im = i - 1 if i > 0 else M - 1
            nbs[0] = ip
            nbs[1] = im
            dx = (X[ip, 0] - X[im, 0]) / (2.0 * h)
            dy = (X[ip, 1] - X[im, 1]) / (2.0 * h)
            g2 = dx * dx + dy * dy
            g = sqrt(g2)
            if not (g > 0.0):
                degenerate = 1.0
                break
            tx = dx / g
            ty = dy / g
            nx = -ty
            ny = tx
            dk = (kappa[ip] - kappa[im]) / (2.0 * h)
            kv = kappa[i]
            pi = pos[i]

            # position rows
            txx = ta[i] * tx * tx * ih2
            txy = ta[i] * tx * ty * ih2
            tyy = ta[i] * ty * ty * ih2
            put(ab, pi, pi, c0 + 2.0 * txx)
            put(ab, pi, pi + 1, 2.0 * txy)
            put(ab, pi + 1, pi, 2.0 * txy)
            put(ab, pi + 1, pi + 1, c0 + 2.0 * tyy)
            put(ab, pi, pi + 2, -nx)
            put(ab, pi + 1, pi + 2, -ny)

            # velocity row
            cx = dk * dx / (g2 * g2) * ih2
            cy = dk * dy / (g2 * g2) * ih2
            put(ab, pi + 2, pi + 2, 1.0)
            put(ab, pi + 2, pi + 3, 2.0 * ih2 / g2 - 0.5 * kv * kv)
            put(ab, pi + 2, pi, -2.0 * cx)
            put(ab, pi + 2, pi + 1, -2.0 * cy)

            # curvature row
            ex = nx * ih2 / g2
            ey = ny * ih2 / g2
            put(ab, pi + 3, pi + 3, 1.0)
            put(ab, pi + 3, pi, -2.0 * ex)
            put(ab, pi + 3, pi + 1, -2.0 * ey)

            for q in range(2):
                pn = pos[nbs[q]]
                put(ab, pi, pn, -txx)
                put(ab, pi, pn + 1, -txy)
                put(ab, pi + 1, pn, -txy)
                put(ab, pi + 1, pn + 1, -tyy)
                put(ab, pi + 2, pn + 3, -ih2 / g2)
                put(ab, pi + 2, pn, cx)
                put(ab, pi + 2, pn + 1, cy)
                put(ab, pi + 3, pn, ex)
                put(ab, pi + 3, pn + 1, ey)

            b[pi] = tb[i] * tx - S[i, 0] / dt
            b[pi + 1] = tb[i] * ty - S[i, 1] / dt

        if degenerate == 0.0:
            dgbsv(&n, &kl, &ku, &nrhs, &ab[0, 0], &ldab, &ipiv[0], &b[0], &ldb, &info)

    if degenerate != 0.0:
        raise DegenerateGeometryError("vanishing tangent in Picard iterate")
    if info > 0:
        raise SingularSystemError(f"zero pivot in column {info}", 0.0)
    if info < 0:
        raise ValueError(f"illegal argument {-info} to dgbsv")

    cdef double pmin = fabs(ab[0, DIAG_ROW]), pmax = pmin, p
    for j in range(1, n):
        p = fabs(ab[j, DIAG_ROW])
        if p < pmin:
            pmin = p
        if p > pmax:
            pmax = p
    if pmin <= PIVOT_RTOL * pmax * n:
        raise SingularSystemError("numerically rank-deficient band matrix", pmin)

    Xn = np.empty((M, 2))
    Vn = np.empty(M)
    kn = np.empty(M)
    cdef double[:, ::1] Xv = Xn
    cdef double[::1] Vv = Vn, kv_ = kn
    for i in range(M):
        pi = pos[i]
        Xv[i, 0] = b[pi]
        Xv[i, 1] = b[pi + 1]
        Vv[i] = b[pi + 2]
        kv_[i] = b[pi + 3]
    return Xn, Vn, kn
