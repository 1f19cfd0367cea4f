"""Exact circle solution, error norms, refinement schedules and mesh quality."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .adaptive import TangentialConfig, evolve_adaptive
from .bdf import SolverConfig, bdf_coefficients, evolve, mesh_ratios
from .grid import GeometricState, polygon, state_from_curve

logger = logging.getLogger(__name__)

# (h0, dt0) per BDF order, and the per-level refinement factors (h, dt)
BASE_PAIRS = {1: (1 / 32, 0.02), 2: (1 / 32, 0.02), 3: (1 / 32, 0.05), 4: (1 / 32, 0.05)}
REFINE = {1: (2.0, 4.0), 2: (2.0, 2.0), 3: (2.0**1.5, 2.0), 4: (4.0, 2.0)}


def exact_circle(t: float) -> tuple[float, float, float]:
    """Radius, normal speed and curvature magnitudes of the shrinking-energy circle.

    ``R(t) = (1 + 2t)^(1/4)``, ``|V| = R^-3 / 2``, ``|kappa| = 1/R``.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    R = (1.0 + 2.0 * t) ** 0.25
    return R, 0.5 * R**-3, 1.0 / R


def solution_error(state: GeometricState, t: float) -> float:
    """Max over nodes of the radial, curvature and velocity magnitude errors.

    Magnitudes make the norm independent of orientation and of tangential
    node motion.
    """
    R, V, k = exact_circle(t)
    r = np.hypot(state.X[:, 0], state.X[:, 1])
    e = np.abs(r - R) + np.abs(np.abs(state.kappa) - k) + np.abs(np.abs(state.V) - V)
    return float(e.max())


def even_nodes(h: float) -> int:
    return max(4, 2 * int(round(1.0 / (2.0 * h))))


def refinement_schedule(k: int, level: int, base=None) -> tuple[float, float, int]:
    """``(h, dt, M)`` at refinement ``level`` for BDF order ``k``.

    Each level divides ``h`` and ``dt`` by the order-specific factors so that
    ``h^2 / dt^k`` stays (nearly) constant.
    """
    bdf_coefficients(k)
    if level < 0:
        raise ValueError("level must be nonnegative")
    h0, dt0 = BASE_PAIRS[k] if base is None else base
    fh, fdt = REFINE[k]
    h = h0 / fh**level
    dt = dt0 / fdt**level
    return h, dt, even_nodes(h)


@dataclass
class ConvergenceRow:
    level: int
    M: int
    h: float
    dt: float
    error: float
    order: float = float("nan")


@dataclass
class ConvergenceTable:
    k: int
    method: str
    rows: list = field(default_factory=list)
    status: str = "ok"
    error: str = ""

    @property
    def orders(self) -> np.ndarray:
        return np.array([r.order for r in self.rows[1:]])


def circle_run(k: int, method: str, M: int, dt: float, T: float = 2.0, startup_substeps=0, **kw):
    """Run one circle simulation with the ``awar``, ``abdfk`` or ``bdfk`` pipeline."""
    initial = state_from_curve(polygon(M))
    if method == "abdfk":
        cfg = SolverConfig(k=k, dt=dt, T=T, startup_substeps=startup_substeps, **kw)
        return evolve_adaptive(initial, cfg, TangentialConfig())
    red = "awar" if method == "awar" else "off"
    cfg = SolverConfig(k=k, dt=dt, T=T, redistribute=red, startup_substeps=startup_substeps, **kw)
    return evolve(initial, cfg)


def convergence_study(k: int, method: str = "awar", levels: int = 4, T: float = 2.0,
                      startup_substeps=0, base=None) -> ConvergenceTable:
    """Error and observed temporal order across refinement levels.

    ``order_l = log(e_{l-1}/e_l) / log(dt_{l-1}/dt_l)`` is reported on the
    finer level of each pair. A failed level ends the study with a partial
    table.
    """
    if levels < 3:
        raise ValueError("need at least 3 levels")
    if method not in ("awar", "abdfk", "bdfk"):
        raise ValueError(f"unknown method {method!r}")
    table = ConvergenceTable(k, method)
    for level in range(levels):
        h, dt, M = refinement_schedule(k, level, base)
        rec = circle_run(k, method, M, dt, T, startup_substeps)
        if not rec.ok:
            table.status, table.error = "aborted", f"level {level}: {rec.error}"
            logger.warning("convergence study stopped: %s", table.error)
            break
        row = ConvergenceRow(level, M, h, dt, solution_error(rec.final, T))
        if table.rows:
            prev = table.rows[-1]
            row.order = math.log(prev.error / row.error) / math.log(prev.dt / row.dt)
        table.rows.append(row)
        logger.info("k=%d %s level %d M=%d dt=%.3g e=%.3e", k, method, level, M, dt, row.error)
    return table


def mesh_quality(X, m) -> tuple[float, float]:
    """``R1 = max ds / min ds`` and ``R2`` with segment weights ``(m_j + m_{j+1}) ds_j / 2``."""
    m = np.asarray(m, dtype=float)
    if np.any(m <= 0):
        raise ValueError("monitor values must be positive")
    return mesh_ratios(X, m)
