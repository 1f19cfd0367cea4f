"""Catalog of closed initial curves sampled at ``rho_i = i / M``."""

from pathlib import Path

import numpy as np

from .grid import MIN_NODES, DimensionError, GeometricState, segment_lengths, state_from_curve


class UnknownCurveError(ValueError):
    """Raised for a curve name that is neither a preset nor a file."""


def _circle(th):
    return np.cos(th), np.sin(th)


def _ellipse(a):
    def f(th):
        return a * np.cos(th), np.sin(th)
    return f


def _bump(th):
    r = 1.0 + 0.3 * np.exp(-((th - np.pi) ** 2) / 0.16)
    return 4.0 + r * np.cos(th), r * np.sin(th)


def _radial(rfun):
    def f(th):
        r = rfun(th)
        return r * np.cos(th), r * np.sin(th)
    return f


def _tear(th):
    return 0.5 * np.sin(th), 1.5 * np.cos(th) * (1.0 + np.cos(th))


def _wiggle(th):
    x = 1.2 * np.cos(th)
    y = 0.5 * np.sin(th) + np.sin(np.cos(th)) + np.sin(th) * (0.2 + np.sin(th) * np.sin(3 * th) ** 2)
    return x, y


def _lemniscate(th):
    d = 1.0 + np.sin(th) ** 2
    return np.cos(th) / d, np.cos(th) * np.sin(th) / d


# each entry maps theta = 2 pi rho to (x, y)
PRESETS = {
    "circle": _circle,
    "ellipse4": _ellipse(4.0),
    "ellipse6": _ellipse(6.0),
    "bump": _bump,
    "flower32": _radial(lambda th: 1.0 + 0.3 * np.sin(2 * th) + 0.2 * np.cos(4 * th)),
    "tear": _tear,
    "wiggle": _wiggle,
    "lemniscate": _lemniscate,
    "petal5": _radial(lambda th: 1.0 + 0.5 * np.cos(5 * th)),
    "petal3": _radial(lambda th: 1.0 - 0.65 * np.cos(3 * th)),
}


def preset_curve(name: str, M: int) -> np.ndarray:
    """Node coordinates of a named preset, shape ``(M, 2)``."""
    if name not in PRESETS:
        raise UnknownCurveError(f"unknown curve {name!r}; presets: {', '.join(sorted(PRESETS))}")
    if M < MIN_NODES:
        raise DimensionError(f"need at least {MIN_NODES} nodes, got {M}")
    th = 2.0 * np.pi * np.arange(M) / M
    x, y = PRESETS[name](th)
    return np.column_stack((x, y))


def load_points(path) -> np.ndarray:
    """Read a two-column ``x y`` (or comma separated) point file."""
    text = Path(path).read_text()
    X = np.loadtxt(text.replace(",", " ").splitlines(), ndmin=2)
    if X.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns, found {X.shape[1]}")
    if X.shape[0] < MIN_NODES:
        raise DimensionError(f"{path}: need at least {MIN_NODES} points")
    return X


def curve_catalog(name: str, M: int = 100) -> GeometricState:
    """Initial state for a preset name or a point-file path.

    Curvature and velocity come from the discrete stencils. Point files
    define their own node count and ignore ``M``.
    """
    if name in PRESETS:
        X = preset_curve(name, M)
    elif Path(name).is_file():
        X = load_points(name)
    else:
        raise UnknownCurveError(f"unknown curve {name!r}; presets: {', '.join(sorted(PRESETS))}")
    segment_lengths(X)
    return state_from_curve(X)
