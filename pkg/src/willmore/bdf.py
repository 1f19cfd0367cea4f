"""BDFk finite-difference time stepping with Picard iteration."""

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction as F

import numpy as np

from . import kernels
from .grid import (DegenerateGeometryError, GeometricState, discrete_curvature, segment_lengths,
                   willmore_energy)
from .energy import ec_step
from .monitor import MonitorModel, MonitorParams, compute_indicators, monitor_values, select_monitor
from .redistribution import awar_step, resample_curve, resample_field

logger = logging.getLogger(__name__)

_BDF = {
    1: (F(1), F(-1)),
    2: (F(3, 2), F(-2), F(1, 2)),
    3: (F(11, 6), F(-3), F(3, 2), F(-1, 3)),
    4: (F(25, 12), F(-4), F(3), F(-4, 3), F(1, 4)),
}


class PicardConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class BdfScheme:
    k: int
    alpha: tuple

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([float(a) for a in self.alpha])


def bdf_coefficients(k: int) -> BdfScheme:
    if k not in _BDF:
        raise ValueError(f"BDF order must be 1..4, got {k}")
    return BdfScheme(k, _BDF[k])


@dataclass
class SolverConfig:
    """Time-stepping controls shared by all three methods.

    ``monitor`` is ``"auto"`` for indicator-driven selection or a fixed
    :class:`MonitorModel` value. ``startup_substeps`` subdivides each of the
    first ``k - 1`` steps; ``"auto"`` picks enough substeps that the
    first-order start is accurate to ``O(dt^k)``.
    """

    k: int = 1
    dt: float = 1e-2
    T: float = 1.0
    tol: float = 1e-8
    max_picard: int = 100
    redistribute: str = "off"
    awar_trigger: str = "always"
    monitor: str = "auto"
    monitor_params: MonitorParams = field(default_factory=MonitorParams)
    startup_substeps: int | str = 0
    snapshot_every: int = 0
    cubic_resample: bool = False

    def __post_init__(self):
        if self.dt <= 0 or self.T <= 0 or self.tol <= 0:
            raise ValueError("dt, T and tol must be positive")
        if self.redistribute not in ("off", "awar"):
            raise ValueError("redistribute must be 'off' or 'awar'")
        if self.awar_trigger not in ("always", "quality"):
            raise ValueError("awar_trigger must be 'always' or 'quality'")
        bdf_coefficients(self.k)

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))


class TimeHistory(deque):
    """The last ``k`` accepted states, oldest first."""

    def __init__(self, k: int, states=()):
        super().__init__(states, maxlen=k)

    def bdf_sum(self, scheme: BdfScheme) -> np.ndarray:
        """``sum_{p=1..k} alpha_p X^{n+1-p}`` for the order of ``scheme``."""
        a = scheme.coefficients
        S = np.zeros_like(self[-1].X)
        for p in range(1, scheme.k + 1):
            S += a[p] * self[-p].X
        return S


def picard_iterate(history, scheme: BdfScheme, dt: float, tol: float, max_picard: int,
                   tangential=None):
    """Iterate the linearized scheme until successive iterates agree to ``tol``.

    ``tangential(X, kappa)`` returns the per-node tangential coefficients
    ``(ta, tb)`` evaluated at the current iterate; ``None`` gives the plain
    scheme with zero tangential velocity.
    """
    if len(history) < scheme.k:
        raise ValueError(f"BDF{scheme.k} needs {scheme.k} history states, have {len(history)}")
    S = history.bdf_sum(scheme)
    alpha0 = float(scheme.alpha[0])
    cur = history[-1]
    X, V, kappa = cur.X, cur.V, cur.kappa
    M = X.shape[0]
    zeros = np.zeros(M)
    for it in range(1, max_picard + 1):
        ta, tb = (zeros, zeros) if tangential is None else tangential(X, kappa)
        Xn, Vn, kn = kernels.picard_solve(X, kappa, S, alpha0, dt, ta, tb)
        if not (np.all(np.isfinite(Xn)) and np.all(np.isfinite(kn))):
            raise DegenerateGeometryError("non-finite Picard iterate")
        err = np.max(np.hypot(*(Xn - X).T) + np.abs(Vn - V) + np.abs(kn - kappa))
        X, V, kappa = Xn, Vn, kn
        if err < tol:
            return GeometricState(X, V, kappa, cur.t + dt), it
    raise PicardConvergenceError(f"Picard iteration did not converge in {max_picard} "
                                 f"iterations (last update {err:.3e})")


def picard_time_step(history, scheme: BdfScheme, config: SolverConfig):
    """One step of the plain BDFk scheme; returns ``(state, iterations)``."""
    return picard_iterate(history, scheme, config.dt, config.tol, config.max_picard)


@dataclass
class StepInfo:
    n: int
    t: float
    W: float
    R1: float
    R2: float
    C0: float
    C1: float
    Q: float
    model: str
    picard_iters: int
    R: float = float("nan")
    ratio: float = float("nan")
    k_c: float = float("nan")
    W_c: float = float("nan")
    D: float = float("nan")


@dataclass
class RunRecord:
    """Per-step diagnostics, snapshots and the final state of a run."""

    method: str
    steps: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    final: GeometricState | None = None
    status: str = "ok"
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.steps])


def mesh_ratios(X, m) -> tuple[float, float]:
    ds, _ = segment_lengths(X)
    R1 = float(ds.max() / ds.min())
    wl = 0.5 * (m + np.roll(m, -1)) * ds
    return R1, float(wl.max() / wl.min())


def quality_row(n, state, model, params, iters, m=None) -> StepInfo:
    ind = compute_indicators(state.X, state.kappa)
    if model is None:
        model = select_monitor(ind, params)
    if m is None:
        m = monitor_values(state.X, state.kappa, model, params)
    R1, R2 = mesh_ratios(state.X, m)
    return StepInfo(n, state.t, willmore_energy(state.kappa, state.X), R1, R2,
                    ind.C0, ind.C1, ind.Q, MonitorModel(model).value, iters)


def startup_substep_count(config: SolverConfig) -> int:
    s = config.startup_substeps
    if config.k == 1 or not s:
        return 1
    if s == "auto":
        # first BDF1 substep error ~ (dt/n)^2 must stay below dt^k
        return max(2 ** config.k, int(np.ceil(config.dt ** (1.0 - config.k / 2.0))))
    return int(s)


class Stepper:
    """Advance a state with BDFk + Picard, optionally redistributing nodes.

    Subclasses override :meth:`tangential_for_step` to add tangential
    motion. When ``ec`` holds an :class:`~willmore.energy.EnergyCorrectorState`
    every provisional step is energy-corrected before redistribution.
    """

    method = "bdfk"

    def __init__(self, config: SolverConfig, ec=None):
        self.config = config
        self.params = config.monitor_params
        self.fixed_model = None if config.monitor == "auto" else MonitorModel(config.monitor)
        self.ec = ec

    def tangential_for_step(self, state):
        """Return ``(callback or None, model label)`` for the coming step."""
        return None, self.fixed_model

    def post_step(self, provisional, previous, dt):
        if self.ec is None:
            return provisional, {}
        state, self.ec, info = ec_step(provisional, previous.X, self.ec, dt)
        return state, {"R": self.ec.R, "ratio": info.eta, "k_c": info.k_c,
                       "W_c": info.W_c, "D": info.D}

    def redistribute(self, state, history):
        cfg = self.config
        if cfg.redistribute != "awar":
            return state, None, None
        if cfg.awar_trigger == "quality":
            ds, _ = segment_lengths(state.X)
            if ds.max() / ds.min() <= self.params.Q_thresh:
                return state, None, None
        res = awar_step(state.X, state.kappa, self.params, model=self.fixed_model,
                        cubic=cfg.cubic_resample)
        self.params = res.params
        M = state.M
        rho_old = np.arange(M + 1) / M
        # earlier levels must live on the same parameters for the BDF sum
        for j in range(len(history) - 1):
            h = history[j]
            history[j] = GeometricState(resample_curve(h.X, rho_old, res.rho), h.V, h.kappa, h.t)
        # kappa is recomputed on the new nodes; V is carried over with the same
        # map, since the fourth-order stencil would amplify rounding on fine grids
        new = GeometricState(res.X, resample_field(state.V, rho_old, res.rho, cfg.cubic_resample),
                             discrete_curvature(res.X), state.t)
        m = monitor_values(new.X, new.kappa, res.model, self.params)
        return new, res.model, m

    def step(self, history, order: int, dt: float):
        scheme = bdf_coefficients(order)
        tangential, model = self.tangential_for_step(history[-1])
        provisional, iters = picard_iterate(history, scheme, dt, self.config.tol,
                                            self.config.max_picard, tangential)
        state, extra = self.post_step(provisional, history[-1], dt)
        return state, iters, model, extra

    def advance(self, history, order: int, dt: float):
        """Step, append to ``history`` and redistribute; returns the accepted state."""
        state, iters, model, extra = self.step(history, order, dt)
        history.append(state)
        state, rmodel, m = self.redistribute(state, history)
        if rmodel is not None:
            history[-1] = state
            model = rmodel
        return state, iters, model, m, extra

    def run(self, initial: GeometricState) -> RunRecord:
        cfg = self.config
        rec = RunRecord(self.method)
        history = TimeHistory(cfg.k, [initial])
        state = initial
        extra0 = {}
        if self.ec is not None:
            W0 = willmore_energy(initial.kappa, initial.X) + self.ec.C
            extra0 = {"R": self.ec.R, "ratio": self.ec.R / W0, "k_c": 1.0, "W_c": W0, "D": 0.0}
        rec.steps.append(self._row(0, initial, self.fixed_model, 0, None, extra0))
        if cfg.snapshot_every:
            rec.snapshots.append(initial.copy())
        nsub = startup_substep_count(cfg)
        n0 = 0
        try:
            if nsub > 1:
                # one continuous fine run over the first k - 1 coarse steps
                fine = TimeHistory(cfg.k, [initial])
                dts = cfg.dt / nsub
                iters = 0
                for j in range((cfg.k - 1) * nsub):
                    state, it, model, m, extra = self.advance(fine, min(j + 1, cfg.k), dts)
                    state.t = (j + 1) * dts
                    iters += it
                    if (j + 1) % nsub == 0:
                        n0 += 1
                        history.append(state)
                        self._record(rec, n0, state, model, iters, m, extra)
                        iters = 0
            for n in range(n0, cfg.n_steps):
                state, iters, model, m, extra = self.advance(history, min(n + 1, cfg.k), cfg.dt)
                state.t = (n + 1) * cfg.dt
                self._record(rec, n + 1, state, model, iters, m, extra)
        except (ArithmeticError, ValueError, RuntimeError) as exc:
            rec.status = "aborted"
            rec.error = f"step {len(rec.steps)}: {type(exc).__name__}: {exc}"
            logger.warning("run aborted at t=%.6g: %s", state.t, rec.error)
            rec.snapshots.append(state.copy())
        rec.final = state
        return rec

    def _record(self, rec, n, state, model, iters, m, extra):
        rec.steps.append(self._row(n, state, model, iters, m, extra))
        every = self.config.snapshot_every
        if every and n % every == 0:
            rec.snapshots.append(state.copy())

    def _row(self, n, state, model, iters, m, extra) -> StepInfo:
        row = quality_row(n, state, model, self.params, iters, m)
        for key, val in extra.items():
            setattr(row, key, val)
        return row


def evolve(initial: GeometricState, config: SolverConfig, ec=None) -> RunRecord:
    """Plain BDFk run, with A-WAR after every step when ``redistribute='awar'``."""
    stepper = Stepper(config, ec)
    stepper.method = "awar" if config.redistribute == "awar" else "bdfk"
    return stepper.run(initial)
