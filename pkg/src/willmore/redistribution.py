"""Weighted arc-length redistribution of curve nodes (WAR / A-WAR)."""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .grid import DegenerateGeometryError, segment_lengths
from .monitor import (GeometricIndicators, MonitorModel, MonitorParams,
                      amplify_params, compute_indicators, monitor_values,
                      select_monitor)


def weighted_cumulative(ds, m):
    """Segment weights ``omega_j = (m_j + m_{j+1}) ds_j / 2`` and their prefix sums.

    Returns ``(omega, w, L_w)`` where ``w`` has ``M + 1`` entries starting at 0.
    """
    ds = np.asarray(ds, dtype=float)
    m = np.asarray(m, dtype=float)
    if ds.shape != m.shape:
        raise ValueError("segment lengths and monitor must have equal length")
    if np.any(ds <= 0) or np.any(m <= 0) or not np.all(np.isfinite(m)):
        raise ValueError("segment lengths and monitor values must be positive")
    omega = 0.5 * (m + np.roll(m, -1)) * ds
    w = np.concatenate(([0.0], np.cumsum(omega)))
    return omega, w, float(w[-1])


def equidistribution_targets(L_w: float, M: int) -> np.ndarray:
    return np.arange(M + 1) / M * L_w


def invert_parameters(w, rho, targets) -> np.ndarray:
    """Invert the piecewise-linear map ``rho -> w`` at the target values."""
    w = np.asarray(w, dtype=float)
    rho = np.asarray(rho, dtype=float)
    targets = np.asarray(targets, dtype=float)
    dw = np.diff(w)
    if np.any(dw <= 0):
        raise ValueError("cumulative weights must be strictly increasing")
    j = np.clip(np.searchsorted(w, targets, side="right") - 1, 0, len(w) - 2)
    return rho[j] + (targets - w[j]) / dw[j] * (rho[j + 1] - rho[j])


def resample_curve(X, rho_old, rho_new, cubic: bool = False) -> np.ndarray:
    """Evaluate the closed curve through ``X`` at new parameters.

    ``rho_old`` holds the ``M + 1`` node parameters including the closing
    value; interpolation is piecewise linear unless ``cubic`` is set.
    """
    X = np.asarray(X, dtype=float)
    closed = np.vstack((X, X[:1]))
    rho_old = np.asarray(rho_old, dtype=float)
    rho_new = np.asarray(rho_new, dtype=float)
    if cubic:
        Xn = CubicSpline(rho_old, closed, bc_type="periodic")(rho_new)
    else:
        Xn = np.column_stack([np.interp(rho_new, rho_old, closed[:, c]) for c in range(2)])
    segment_lengths(Xn)
    return Xn


def resample_field(f, rho_old, rho_new, cubic: bool = False) -> np.ndarray:
    """Periodic interpolation of a nodal scalar field at new parameters."""
    f = np.asarray(f, dtype=float)
    closed = np.append(f, f[0])
    if cubic:
        return CubicSpline(rho_old, closed, bc_type="periodic")(rho_new)
    return np.interp(rho_new, rho_old, closed)


def war_parameters(X, m) -> np.ndarray:
    """Equidistributed parameters ``rho_new_0..rho_new_{M-1}`` (``rho_new_0 = 0``)."""
    X = np.asarray(X, dtype=float)
    M = X.shape[0]
    ds, _ = segment_lengths(X)
    _, w, L_w = weighted_cumulative(ds, m)
    rho = np.arange(M + 1) / M
    rho_new = invert_parameters(w, rho, equidistribution_targets(L_w, M))
    rho_new[0] = 0.0
    if np.any(np.diff(rho_new) <= 0):
        raise DegenerateGeometryError("redistributed parameters are not increasing")
    return rho_new[:M]


def war_redistribute(X, m, cubic: bool = False) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    M = X.shape[0]
    rho_new = war_parameters(X, m)
    return resample_curve(X, np.arange(M + 1) / M, rho_new, cubic=cubic)


@dataclass
class AwarResult:
    X: np.ndarray
    rho: np.ndarray
    model: MonitorModel
    indicators: GeometricIndicators
    params: MonitorParams
    m: np.ndarray


def awar_step(X, kappa, params: MonitorParams, model=None, cubic: bool = False) -> AwarResult:
    """One adaptive redistribution: indicators, model choice, monitor, WAR.

    ``model`` fixes the monitor instead of selecting it from the indicators.
    The returned ``params`` carry any amplification triggered by ``Q``.
    """
    X = np.asarray(X, dtype=float)
    ind = compute_indicators(X, kappa)
    chosen = select_monitor(ind, params) if model is None else MonitorModel(model)
    params = amplify_params(params, ind.Q)
    m = monitor_values(X, kappa, chosen, params)
    rho = war_parameters(X, m)
    M = X.shape[0]
    Xn = resample_curve(X, np.arange(M + 1) / M, rho, cubic=cubic)
    return AwarResult(Xn, rho, chosen, ind, params, m)
