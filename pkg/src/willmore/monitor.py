"""Curvature-driven monitor functions and adaptive model selection."""

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .grid import arc_derivative, segment_lengths


class MonitorModel(str, Enum):
    CONSTANT = "constant"
    LINEAR = "linear"
    HYBRID = "hybrid"
    QUADRATIC = "quadratic"
    GRADIENT_ENHANCED = "grad"
    HIGH_ORDER_COMBINED = "highorder"


@dataclass(frozen=True)
class GeometricIndicators:
    C0: float
    C1: float
    Q: float


@dataclass(frozen=True)
class MonitorParams:
    """Monitor coefficients and regime thresholds.

    ``alpha`` and ``gamma`` start at ``alpha0`` / ``gamma0`` and may be
    amplified when the mesh ratio ``Q`` exceeds ``Q_thresh``; they are
    capped at ``alpha_max`` / ``gamma_max`` (default ``100 * alpha0``).
    """

    alpha0: float = 1.0
    gamma0: float = 0.1
    beta: float = 0.3
    C0_low: float = 2.0
    C0_high: float = 10.0
    C1_low: float = 5.0
    C1_high: float = 50.0
    Q_thresh: float = 2.0
    amp_factor: float = 1.5
    alpha: float | None = None
    gamma: float | None = None
    alpha_max: float | None = None
    gamma_max: float | None = None
    smooth: bool = False

    def __post_init__(self):
        if self.alpha is None:
            object.__setattr__(self, "alpha", self.alpha0)
        if self.gamma is None:
            object.__setattr__(self, "gamma", self.gamma0)
        if self.alpha_max is None:
            object.__setattr__(self, "alpha_max", 100.0 * self.alpha0)
        if self.gamma_max is None:
            object.__setattr__(self, "gamma_max", 100.0 * self.alpha0)
        if not (0.0 < self.beta < 1.0):
            raise ValueError("beta must lie in (0, 1)")
        if self.alpha <= 0 or self.gamma < 0:
            raise ValueError("alpha must be positive and gamma nonnegative")
        if not (0 < self.C0_low < self.C0_high and 0 < self.C1_low < self.C1_high):
            raise ValueError("thresholds must satisfy 0 < low < high")
        if self.Q_thresh <= 1.0 or self.amp_factor < 1.0:
            raise ValueError("need Q_thresh > 1 and amp_factor >= 1")


def compute_indicators(X, kappa) -> GeometricIndicators:
    kappa = np.asarray(kappa, dtype=float)
    ds, _ = segment_lengths(X)
    ks = arc_derivative(kappa, X)
    return GeometricIndicators(
        C0=float(np.max(np.abs(kappa))),
        C1=float(np.max(np.abs(ks))),
        Q=float(ds.max() / ds.min()),
    )


def select_monitor(ind: GeometricIndicators, params: MonitorParams) -> MonitorModel:
    """Pick the base model from ``C0`` and let ``C1`` override it.

    Lower thresholds are inclusive and upper thresholds exclusive.
    """
    if ind.C1 >= params.C1_high:
        return MonitorModel.HIGH_ORDER_COMBINED
    if ind.C1 >= params.C1_low:
        return MonitorModel.GRADIENT_ENHANCED
    if ind.C0 < params.C0_low:
        return MonitorModel.LINEAR
    if ind.C0 < params.C0_high:
        return MonitorModel.HYBRID
    return MonitorModel.QUADRATIC


def eval_monitor(model, params: MonitorParams, kappa, kappa_s) -> np.ndarray:
    kappa = np.asarray(kappa, dtype=float)
    kappa_s = np.asarray(kappa_s, dtype=float)
    if kappa.shape != kappa_s.shape:
        raise ValueError("kappa and kappa_s must have the same shape")
    if np.isnan(kappa).any() or np.isnan(kappa_s).any():
        raise ValueError("NaN in monitor input")
    model = MonitorModel(model)
    a, b, g = params.alpha, params.beta, params.gamma
    ak = np.abs(kappa)
    if model is MonitorModel.CONSTANT:
        m = np.ones_like(kappa)
    elif model is MonitorModel.LINEAR:
        m = 1.0 + a * ak
    elif model is MonitorModel.HYBRID:
        m = 1.0 + a * ((1.0 - b) * ak + b * kappa**2)
    elif model is MonitorModel.QUADRATIC:
        m = 1.0 + a * kappa**2
    elif model is MonitorModel.GRADIENT_ENHANCED:
        m = 1.0 + a * ak + g * np.abs(kappa_s)
    else:
        m = 1.0 + a * np.sqrt(kappa**2 + g * kappa_s**2)
    if params.smooth:
        m = (np.roll(m, 1) + m + np.roll(m, -1)) / 3.0
    return m


def amplify_params(params: MonitorParams, Q: float) -> MonitorParams:
    """Scale ``alpha`` and ``gamma`` by ``amp_factor`` when ``Q > Q_thresh``."""
    if Q <= params.Q_thresh:
        return params
    return replace(
        params,
        alpha=min(params.alpha * params.amp_factor, params.alpha_max),
        gamma=min(params.gamma * params.amp_factor, params.gamma_max),
    )


def monitor_values(X, kappa, model, params: MonitorParams) -> np.ndarray:
    """Evaluate ``model`` on a curve, using the arc derivative of ``kappa``."""
    return eval_monitor(model, params, kappa, arc_derivative(kappa, X))


def interpolation_error_bound(kappa, kappa_s, seg) -> np.ndarray:
    """Per-segment chord deviation estimate ``h^2|k| + h^3|k_s| + h^3 k^2``."""
    kappa = np.asarray(kappa, dtype=float)
    kappa_s = np.asarray(kappa_s, dtype=float)
    h = np.asarray(seg, dtype=float)
    return h**2 * np.abs(kappa) + h**3 * np.abs(kappa_s) + h**3 * kappa**2
