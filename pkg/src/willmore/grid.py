"""Discrete geometry on a uniform periodic parameter grid.

Curves are ``(M, 2)`` float arrays of node coordinates sampled at
``rho_i = i / M``; scalar fields are ``(M,)`` arrays. Index arithmetic is
periodic throughout.
"""

from dataclasses import dataclass, field

import numpy as np

MIN_NODES = 4
DEGENERATE_RTOL = 1e-14

# n = ROT @ tau
ROT = np.array([[0.0, -1.0], [1.0, 0.0]])


class DimensionError(ValueError):
    """Raised when a field has fewer than four nodes or shapes disagree."""


class DegenerateGeometryError(ValueError):
    """Raised when consecutive nodes collapse or a tangent vanishes."""


@dataclass
class GeometricState:
    """Nodal positions, normal velocity and curvature at one time level."""

    X: np.ndarray
    V: np.ndarray
    kappa: np.ndarray
    t: float = 0.0
    extra: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.V = np.asarray(self.V, dtype=float)
        self.kappa = np.asarray(self.kappa, dtype=float)
        if self.X.ndim != 2 or self.X.shape[1] != 2:
            raise DimensionError(f"X must have shape (M, 2), got {self.X.shape}")
        M = self.X.shape[0]
        if self.V.shape != (M,) or self.kappa.shape != (M,):
            raise DimensionError("X, V and kappa must share the node count")
        if M < MIN_NODES:
            raise DimensionError(f"need at least {MIN_NODES} nodes, got {M}")

    @property
    def M(self) -> int:
        return self.X.shape[0]

    def copy(self) -> "GeometricState":
        return GeometricState(self.X.copy(), self.V.copy(), self.kappa.copy(), self.t)

    def scaled(self, factor: float) -> "GeometricState":
        return GeometricState(factor * self.X, factor * self.V, factor * self.kappa, self.t)


def _check(f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape[0] < MIN_NODES:
        raise DimensionError(f"need at least {MIN_NODES} nodes, got {f.shape[0]}")
    return f


def spacing(M: int) -> float:
    return 1.0 / M


def diff_ops(f, kind: str) -> np.ndarray:
    """Periodic finite differences with spacing ``h = 1/M``.

    ``kind`` is one of ``forward``, ``backward``, ``centered`` or ``second``.
    Vector-valued input of shape ``(M, d)`` is differenced componentwise.
    """
    f = _check(f)
    h = 1.0 / f.shape[0]
    fp = np.roll(f, -1, axis=0)
    fm = np.roll(f, 1, axis=0)
    if kind == "forward":
        return (fp - f) / h
    if kind == "backward":
        return (f - fm) / h
    if kind == "centered":
        return (fp - fm) / (2.0 * h)
    if kind == "second":
        return (fp - 2.0 * f + fm) / (h * h)
    raise ValueError(f"unknown difference kind {kind!r}")


def segment_lengths(X) -> tuple[np.ndarray, np.ndarray]:
    """Chord lengths ``ds_j = |X_{j+1} - X_j|`` and cumulative ``s_0..s_M``."""
    X = _check(X)
    ds = np.linalg.norm(np.roll(X, -1, axis=0) - X, axis=1)
    L = ds.sum()
    if not np.all(np.isfinite(ds)) or ds.min() <= DEGENERATE_RTOL * L:
        raise DegenerateGeometryError(
            f"segment of length {ds.min():.3e} (curve length {L:.3e})")
    s = np.concatenate(([0.0], np.cumsum(ds)))
    return ds, s


def _tangent_data(X):
    X = _check(X)
    d = diff_ops(X, "centered")
    g = np.hypot(d[:, 0], d[:, 1])
    h = 1.0 / X.shape[0]
    L = np.linalg.norm(np.roll(X, -1, axis=0) - X, axis=1).sum()
    if not np.all(np.isfinite(g)) or (h * g).min() <= DEGENERATE_RTOL * L:
        i = int(np.argmin(g))
        raise DegenerateGeometryError(f"vanishing centered difference at node {i}")
    return d, g


def tangent_normal(X) -> tuple[np.ndarray, np.ndarray]:
    """Unit tangents ``tau_i`` and normals ``n_i = R tau_i``."""
    d, g = _tangent_data(X)
    tau = d / g[:, None]
    n = np.column_stack((-tau[:, 1], tau[:, 0]))
    return tau, n


def discrete_curvature(X) -> np.ndarray:
    """Scalar curvature ``kappa_i = -(d2X_i . n_i) / |dX_i|^2``.

    Counterclockwise convex curves have negative curvature with this normal.
    """
    d, g = _tangent_data(X)
    d2 = diff_ops(X, "second")
    # n . d2 with n = (-d_y, d_x) / g
    return -(d[:, 0] * d2[:, 1] - d[:, 1] * d2[:, 0]) / g**3


def discrete_velocity(X, kappa) -> np.ndarray:
    """Normal velocity ``V = k_ss + k^3/2`` from the parametric stencil."""
    d, g = _tangent_data(X)
    kappa = np.asarray(kappa, dtype=float)
    d2 = diff_ops(X, "second")
    dk = diff_ops(kappa, "centered")
    d2k = diff_ops(kappa, "second")
    return d2k / g**2 - dk * np.einsum("ij,ij->i", d, d2) / g**4 + 0.5 * kappa**3


def arc_derivative(f, X) -> np.ndarray:
    """Centered arc-length derivative ``(f_{i+1} - f_{i-1}) / (ds_i + ds_{i-1})``."""
    f = _check(f)
    ds, _ = segment_lengths(X)
    if f.shape[0] != ds.shape[0]:
        raise DimensionError("field and curve node counts differ")
    return (np.roll(f, -1) - np.roll(f, 1)) / (ds + np.roll(ds, 1))


def willmore_energy(kappa, X) -> float:
    """Discrete bending energy ``(h/2) sum kappa_i^2 |dX_i|``.

    The factor ``h`` makes this a quadrature of ``1/2 int kappa^2 ds``.
    """
    kappa = np.asarray(kappa, dtype=float)
    X = np.asarray(X, dtype=float)
    if kappa.shape[0] != X.shape[0]:
        raise DimensionError("kappa and curve node counts differ")
    h = 1.0 / X.shape[0]
    g = np.linalg.norm(diff_ops(X, "centered"), axis=1)
    return 0.5 * h * float(np.sum(kappa**2 * g))


def dissipation(V, X) -> float:
    """Discrete dissipation ``h sum V_i^2 |dX_i|``."""
    V = np.asarray(V, dtype=float)
    X = np.asarray(X, dtype=float)
    if V.shape[0] != X.shape[0]:
        raise DimensionError("V and curve node counts differ")
    h = 1.0 / X.shape[0]
    g = np.linalg.norm(diff_ops(X, "centered"), axis=1)
    return h * float(np.sum(V**2 * g))


def polygon(M: int, radius: float = 1.0) -> np.ndarray:
    """Counterclockwise regular M-gon inscribed in a circle."""
    theta = 2.0 * np.pi * np.arange(M) / M
    return radius * np.column_stack((np.cos(theta), np.sin(theta)))


def state_from_curve(X, t: float = 0.0) -> GeometricState:
    """Build a consistent state: curvature and velocity from the stencils."""
    X = np.asarray(X, dtype=float)
    kappa = discrete_curvature(X)
    return GeometricState(X, discrete_velocity(X, kappa), kappa, t)
