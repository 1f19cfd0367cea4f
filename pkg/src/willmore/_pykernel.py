"""Pure-Python Picard kernel (numpy assembly, LAPACK band solve).

Fallback for :mod:`willmore._ckernel`; both expose ``picard_solve`` with the
same signature and must agree to rounding.
"""

import numpy as np

from .grid import DegenerateGeometryError
from .linsys import NVAR, SparseSystem, solve_periodic


def assemble_picard_system(X, kappa, S, alpha0, dt, ta, tb) -> SparseSystem:
    """Linearized system for one Picard iteration at iterate ``(X, kappa)``.

    Per node ``i`` the rows are::

        alpha0/dt X_i - ta_i tau_i (tau_i . d2X_i) - V_i n_i = tb_i tau_i - S_i/dt
        V_i - d2k_i/g^2 + dk_i (dX_i . d2X_i)/g^4 - kappa_i^2 k_i / 2 = 0
        k_i + n_i . d2X_i / g^2 = 0

    where ``g = |dX_i|``, ``tau``, ``n``, ``dX`` and ``dk`` come from the
    iterate and ``d2`` acts on the unknowns. ``S`` is the BDF history sum
    ``sum_{p>=1} alpha_p X^{n+1-p}``; ``ta``/``tb`` carry the tangential
    velocity (zero for the plain scheme).
    """
    X = np.asarray(X, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    M = X.shape[0]
    h = 1.0 / M
    ih2 = 1.0 / (h * h)
    Xp, Xm = np.roll(X, -1, axis=0), np.roll(X, 1, axis=0)
    d = (Xp - Xm) / (2.0 * h)
    g = np.hypot(d[:, 0], d[:, 1])
    if not np.all(g > 0):
        raise DegenerateGeometryError("vanishing tangent in Picard iterate")
    tx, ty = d[:, 0] / g, d[:, 1] / g
    nx, ny = -ty, tx
    dk = (np.roll(kappa, -1) - np.roll(kappa, 1)) / (2.0 * h)
    g2 = g * g

    i = np.arange(M)
    ip, im = np.roll(i, -1), np.roll(i, 1)
    bx, by, bV, bk = NVAR * i, NVAR * i + 1, NVAR * i + 2, NVAR * i + 3
    rows, cols, vals = [], [], []

    def put(r, c, v):
        rows.append(r)
        cols.append(c)
        vals.append(np.broadcast_to(v, r.shape))

    c0 = alpha0 / dt
    # tangential projector coefficients, stencil weight -2 on i and +1 on i +- 1
    txx, txy, tyy = ta * tx * tx * ih2, ta * tx * ty * ih2, ta * ty * ty * ih2
    put(bx, bx, c0 + 2.0 * txx)
    put(bx, by, 2.0 * txy)
    put(by, bx, 2.0 * txy)
    put(by, by, c0 + 2.0 * tyy)
    for nb in (ip, im):
        put(bx, NVAR * nb, -txx)
        put(bx, NVAR * nb + 1, -txy)
        put(by, NVAR * nb, -txy)
        put(by, NVAR * nb + 1, -tyy)
    put(bx, bV, -nx)
    put(by, bV, -ny)

    # velocity row
    put(bV, bV, 1.0)
    put(bV, bk, 2.0 * ih2 / g2 - 0.5 * kappa**2)
    cx = dk * d[:, 0] / (g2 * g2) * ih2
    cy = dk * d[:, 1] / (g2 * g2) * ih2
    put(bV, bx, -2.0 * cx)
    put(bV, by, -2.0 * cy)
    for nb in (ip, im):
        put(bV, NVAR * nb + 3, -ih2 / g2)
        put(bV, NVAR * nb, cx)
        put(bV, NVAR * nb + 1, cy)

    # curvature row
    put(bk, bk, 1.0)
    ex, ey = nx * ih2 / g2, ny * ih2 / g2
    put(bk, bx, -2.0 * ex)
    put(bk, by, -2.0 * ey)
    for nb in (ip, im):
        put(bk, NVAR * nb, ex)
        put(bk, NVAR * nb + 1, ey)

    rhs = np.zeros((M, NVAR))
    rhs[:, 0] = tb * tx - S[:, 0] / dt
    rhs[:, 1] = tb * ty - S[:, 1] / dt
    return SparseSystem(NVAR * M, np.concatenate(rows), np.concatenate(cols),
                        np.concatenate(vals), rhs.ravel())


def picard_solve(X, kappa, S, alpha0, dt, ta, tb):
    """Solve one Picard iteration; returns ``(X, V, kappa)`` of the new iterate."""
    system = assemble_picard_system(X, kappa, S, alpha0, dt, ta, tb)
    u = solve_periodic(system).reshape(-1, NVAR)
    return np.ascontiguousarray(u[:, :2]), u[:, 2].copy(), u[:, 3].copy()
