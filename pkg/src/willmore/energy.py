"""Energy correction with a scalar auxiliary energy.

The auxiliary energy ``R`` decays monotonically by construction; the
provisional state is rescaled by a matching factor ``k_c`` so that its
energy tracks ``R``.
"""

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .grid import GeometricState, dissipation, willmore_energy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnergyCorrectorState:
    """Auxiliary energy ``R`` with shift ``C`` and smoothing exponent ``r``."""

    R: float
    C: float = 1.0
    r: float = 5.0

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError(f"auxiliary energy must be positive, got {self.R}")
        if not self.C >= 1:
            raise ValueError(f"energy shift C must be >= 1, got {self.C}")
        if not self.r > 0:
            raise ValueError(f"smoothing exponent r must be positive, got {self.r}")


def initial_corrector(state: GeometricState, C: float = 1.0, r: float = 5.0) -> EnergyCorrectorState:
    """``R^0 = W(U^0) + C``, the shifted energy of the initial state."""
    return EnergyCorrectorState(willmore_energy(state.kappa, state.X) + C, C, r)


def matching_factor(eta: float, r: float) -> float:
    return 1.0 - (1.0 - eta) ** r


@dataclass(frozen=True)
class CorrectionInfo:
    """Quantities of one correction step, kept for diagnostics."""

    W_c: float
    D: float
    eta: float
    k_c: float


def ec_step(provisional: GeometricState, prev_X, state: EnergyCorrectorState, dt: float):
    """Apply one energy-correction step.

    Parameters
    ----------
    provisional : GeometricState
        Output of the time stepper before correction.
    prev_X : ndarray, shape (M, 2)
        Curve at the previous time level; the dissipation is measured on it.
    state : EnergyCorrectorState
        Carries ``R^n``.
    dt : float
        Time step.

    Returns
    -------
    corrected : GeometricState
        ``k_c`` times every component of ``provisional``.
    new_state : EnergyCorrectorState
        Carries ``R^{n+1}``.
    info : CorrectionInfo
    """
    W_c = willmore_energy(provisional.kappa, provisional.X) + state.C
    D = dissipation(provisional.V, prev_X)
    if not (math.isfinite(W_c) and math.isfinite(D)):
        raise FloatingPointError("non-finite energy or dissipation in energy correction")
    R_new = state.R / (1.0 + dt * D / W_c)
    eta = R_new / W_c
    k_c = matching_factor(eta, state.r)
    if not math.isfinite(k_c):
        raise FloatingPointError("non-finite energy matching factor")
    logger.debug("energy correction: 1 - k_c = %.3e", 1.0 - k_c)
    corrected = provisional.scaled(k_c)
    return corrected, replace(state, R=R_new), CorrectionInfo(W_c, D, eta, k_c)


def decay_identity_residual(R_old: float, R_new: float, W_c: float, D: float, dt: float) -> float:
    """``R^{n+1} - R^n + dt (R^{n+1}/W_c) D``, zero up to rounding."""
    return R_new - R_old + dt * R_new / W_c * D


def corrected_energies(record) -> np.ndarray:
    """Energy ``W`` of the accepted (scaled) states of a run."""
    return record.column("W")
