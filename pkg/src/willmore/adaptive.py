"""Adaptive moving-mesh BDFk scheme with monitor-driven tangential velocity.

The nodes move with ``X_t = V n + T tau`` where the tangential speed ``T``
is the gradient flow of a monitor-weighted mesh energy,

    T = (P / J) (m |X_rho|)^-2 d_rho (m |X_rho|),

which pushes the parametrization toward equidistribution of ``m ds``.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .bdf import RunRecord, SolverConfig, Stepper, bdf_coefficients, picard_iterate
from .grid import _tangent_data, diff_ops
from .monitor import amplify_params, compute_indicators, monitor_values, select_monitor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TangentialConfig:
    """Smoothing operator ``P`` (scalar or per-node field) and relaxation time ``J``.

    ``freeze_monitor`` evaluates the monitor once per time step instead of
    at every Picard iterate.
    """

    P: float | np.ndarray = 1.0
    J: float = 0.5
    freeze_monitor: bool = False

    def __post_init__(self):
        if not np.all(np.asarray(self.P) > 0):
            raise ValueError("P must be positive everywhere")
        if not self.J > 0:
            raise ValueError("J must be positive")


def tangential_coefficients(X, m, P, J):
    """Split ``T_i = ta_i (tau_i . d2X_i) + tb_i`` into its two coefficients.

    ``ta`` multiplies the second difference of the unknown positions in the
    linear system; ``tb`` is the explicit monitor-gradient part.
    """
    m = np.asarray(m, dtype=float)
    if np.any(m <= 0) or np.isnan(m).any():
        raise ValueError("monitor values must be positive")
    _, g = _tangent_data(X)
    dm = diff_ops(m, "centered")
    ta = P / (J * m * g**2)
    tb = P * dm / (J * m**2 * g)
    return ta, tb


def tangential_velocity(X, m, tc: TangentialConfig | None = None, P=None, J=None) -> np.ndarray:
    """Nodal tangential speed ``T_i`` (multiplying ``tau_i``).

    ``P`` and ``J`` override the values in ``tc``; ``P = 0`` is allowed here
    so the plain-scheme limit can be checked.
    """
    tc = tc or TangentialConfig()
    P = tc.P if P is None else P
    J = tc.J if J is None else J
    d, g = _tangent_data(X)
    tau = d / g[:, None]
    d2 = diff_ops(X, "second")
    ta, tb = tangential_coefficients(X, m, P, J)
    return ta * np.einsum("ij,ij->i", tau, d2) + tb


class AdaptiveStepper(Stepper):
    """BDFk stepper whose nodes carry the monitor-driven tangential velocity.

    The monitor model is either fixed by the configuration or selected once
    per step from the geometric indicators of the current state, with sticky
    parameter amplification when the mesh ratio deteriorates.
    """

    method = "abdfk"

    def __init__(self, config: SolverConfig, tc: TangentialConfig | None = None, ec=None):
        super().__init__(config, ec)
        self.tc = tc or TangentialConfig()

    def step_model(self, state):
        if self.fixed_model is not None:
            return self.fixed_model
        ind = compute_indicators(state.X, state.kappa)
        model = select_monitor(ind, self.params)
        self.params = amplify_params(self.params, ind.Q)
        return model

    def tangential_for_step(self, state):
        model = self.step_model(state)
        params, tc = self.params, self.tc
        if tc.freeze_monitor:
            m0 = monitor_values(state.X, state.kappa, model, params)

            def callback(X, kappa):
                return tangential_coefficients(X, m0, tc.P, tc.J)
        else:
            def callback(X, kappa):
                m = monitor_values(X, kappa, model, params)
                return tangential_coefficients(X, m, tc.P, tc.J)
        return callback, model


def adaptive_picard_step(history, scheme, config: SolverConfig, tc: TangentialConfig | None = None,
                         model=None):
    """One A-BDFk step; returns ``(state, iterations)``.

    ``model`` fixes the monitor; by default the configured monitor (or the
    indicator-selected one when ``config.monitor == 'auto'``) is used.
    """
    stepper = AdaptiveStepper(config, tc)
    if model is not None:
        stepper.fixed_model = model
    callback, _ = stepper.tangential_for_step(history[-1])
    return picard_iterate(history, scheme, config.dt, config.tol, config.max_picard, callback)


def evolve_adaptive(initial, config: SolverConfig, tc: TangentialConfig | None = None,
                    ec=None) -> RunRecord:
    """Run the adaptive scheme to ``config.T``, optionally with energy correction."""
    bdf_coefficients(config.k)
    return AdaptiveStepper(config, tc, ec).run(initial)
