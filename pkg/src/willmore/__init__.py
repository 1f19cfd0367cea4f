"""Finite-difference solvers for the planar Willmore flow of closed curves.

Three pipelines share one BDFk/Picard core: the plain scheme, the same
scheme followed by adaptive weighted arc-length redistribution (A-WAR),
and an adaptive moving-mesh scheme with monitor-driven tangential
velocity (A-BDFk). An optional energy correction enforces monotone decay
of an auxiliary energy.
"""

from .adaptive import (AdaptiveStepper, TangentialConfig, adaptive_picard_step,
                       evolve_adaptive, tangential_velocity)
from .bdf import (BdfScheme, PicardConvergenceError, RunRecord, SolverConfig, StepInfo,
                  TimeHistory, bdf_coefficients, evolve, picard_time_step)
from .curves import PRESETS, curve_catalog
from .energy import EnergyCorrectorState, ec_step, initial_corrector
from .grid import (DegenerateGeometryError, DimensionError, GeometricState, arc_derivative,
                   diff_ops, discrete_curvature, discrete_velocity, dissipation, polygon,
                   segment_lengths, state_from_curve, tangent_normal, willmore_energy)
from .kernels import BACKEND
from .linsys import SingularSystemError, SparseSystem, solve
from .monitor import (GeometricIndicators, MonitorModel, MonitorParams, compute_indicators,
                      eval_monitor, select_monitor)
from .redistribution import awar_step, war_redistribute
from .verification import (convergence_study, exact_circle, mesh_quality, refinement_schedule,
                           solution_error)

__version__ = "0.1.0"
