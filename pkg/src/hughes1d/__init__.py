"""Particle and finite-volume solvers for two-exit pedestrian flow in 1D.

The package simulates a corridor [-1, 1] whose crowd splits at a
dynamically computed turning point: the position at which the
cost-weighted distances to the two exits balance.  It provides

* a deterministic follow-the-leader particle scheme with collision
  detection between particles and the turning point,
* a Godunov finite-volume reference solver for the same flux law,
* closed-form checkers for jump data and the smallness conditions that
  guarantee collision-free evolution,
* exact L1/TV analysis utilities and a config-driven command line.
"""

from .analysis import (ComparisonReport, ConvergenceRow, align_series,
                       compare_methods, convergence_study)
from .atomize import (ParticleConfiguration, atomize, atomize_count,
                      atomize_riemann, discrete_density)
from .density import (PiecewiseConstantDensity, l1_distance, symmetrize,
                      total_variation)
from .errors import (AtomizationError, BracketingError, CFLError, ConfigError,
                     DomainError, Hughes1DError, ModelError, OrderingError,
                     StepSizeError)
from .ftl import (CrossingEvent, EvacuationReport, IntegratorConfig,
                  ParticleState, apply_crossing_policy, evacuation_metrics,
                  ftl_rhs, initial_state, integrate)
from .godunov import EulerianState, godunov_flux, run_godunov, step_eulerian
from .model import (DerivedConstants, ModelFunctions, linear_constant_cost,
                    linear_reciprocal)
from .series import SnapshotSeries
from .turning import (TurningPointSolution, check_theorem2, cone_speed,
                      critical_rho_max, riemann_collision_indicator,
                      riemann_initial_xi, solve_turning_point,
                      turning_point_velocity)

__version__ = "0.1.0"

__all__ = [
    "AtomizationError", "BracketingError", "CFLError", "ComparisonReport",
    "ConfigError", "ConvergenceRow", "CrossingEvent", "DerivedConstants",
    "DomainError", "EulerianState", "EvacuationReport", "Hughes1DError",
    "IntegratorConfig", "ModelError", "ModelFunctions", "OrderingError",
    "ParticleConfiguration", "ParticleState", "PiecewiseConstantDensity",
    "SnapshotSeries", "StepSizeError", "TurningPointSolution",
    "align_series", "apply_crossing_policy", "atomize", "atomize_count",
    "atomize_riemann", "check_theorem2", "compare_methods", "cone_speed",
    "convergence_study", "critical_rho_max", "discrete_density",
    "evacuation_metrics", "ftl_rhs", "godunov_flux", "initial_state",
    "integrate", "l1_distance", "linear_constant_cost", "linear_reciprocal",
    "riemann_collision_indicator", "riemann_initial_xi", "run_godunov",
    "solve_turning_point", "step_eulerian", "symmetrize", "total_variation",
    "turning_point_velocity",
]
