"""Cross-method comparison and convergence measurements.

Distances between piecewise-constant densities are exact (merged
breakpoints, no quadrature), so the comparisons isolate genuine scheme
differences rather than post-processing noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .atomize import atomize
from .density import (PiecewiseConstantDensity, l1_distance,  # noqa: F401
                      total_variation)
from .ftl import IntegratorConfig, initial_state, integrate
from .godunov import run_godunov
from .model import ModelFunctions
from .series import SnapshotSeries  # noqa: F401


@dataclass(frozen=True)
class ComparisonReport:
    """Per-snapshot distances between two runs of the same problem."""

    times: np.ndarray
    l1_density: np.ndarray
    xi_first: np.ndarray
    xi_second: np.ndarray
    resolution: dict = field(default_factory=dict)

    @property
    def abs_xi_diff(self) -> np.ndarray:
        return np.abs(self.xi_first - self.xi_second)

    @property
    def sup_xi_distance(self) -> float:
        return float(np.max(self.abs_xi_diff))


def compare_methods(ftl_series: SnapshotSeries,
                    god_series: SnapshotSeries) -> ComparisonReport:
    """Pointwise-in-time density and turning-point distances.

    Both series must share the snapshot grid; use :func:`align_series`
    first when cadences differ.
    """
    ta, tb = ftl_series.times, god_series.times
    if ta.size != tb.size or np.any(np.abs(ta - tb) > 1e-9):
        raise ValueError("snapshot time grids do not match")
    l1 = np.array([l1_distance(a, b) for a, b in
                   zip(ftl_series.densities, god_series.densities)])
    resolution = {
        "first_method": ftl_series.method,
        "second_method": god_series.method,
        **{f"first_{k}": v for k, v in ftl_series.meta.items()
           if k in ("num_particles", "mass_m")},
        **{f"second_{k}": v for k, v in god_series.meta.items()
           if k in ("num_cells", "dt_max")},
    }
    return ComparisonReport(ta.copy(), l1, ftl_series.xi_history.copy(),
                            god_series.xi_history.copy(), resolution)


def align_series(a: SnapshotSeries, b: SnapshotSeries,
                 tol: float = 1e-9) -> tuple[SnapshotSeries, SnapshotSeries]:
    """Restrict both series to their common snapshot times."""
    ia, ib = [], []
    j = 0
    for i, t in enumerate(a.times):
        while j < b.times.size and b.times[j] < t - tol:
            j += 1
        if j < b.times.size and abs(b.times[j] - t) <= tol:
            ia.append(i)
            ib.append(j)
            j += 1
    if not ia:
        raise ValueError("series share no snapshot times")

    def restrict(s: SnapshotSeries, idx: list[int]) -> SnapshotSeries:
        return SnapshotSeries(
            method=s.method,
            times=s.times[idx],
            densities=[s.densities[i] for i in idx],
            xi_history=s.xi_history[idx],
            events=s.events,
            positions=None if s.positions is None
            else [s.positions[i] for i in idx],
            inside_mass=None if s.inside_mass is None else s.inside_mass[idx],
            max_density=None if s.max_density is None else s.max_density[idx],
            cost_residual=None if s.cost_residual is None
            else s.cost_residual[idx],
            boundary_outflux=None if s.boundary_outflux is None
            else s.boundary_outflux[idx],
            meta=dict(s.meta),
        )

    return restrict(a, ia), restrict(b, ib)


@dataclass(frozen=True)
class ConvergenceRow:
    n_dyadic: int
    num_gaps: int
    l1_error: float
    observed_order: float | None


def convergence_study(m: ModelFunctions, initial: PiecewiseConstantDensity,
                      n_list: Sequence[int], t_probe: float,
                      reference_cells: int = 2000,
                      integrator: IntegratorConfig | None = None
                      ) -> list[ConvergenceRow]:
    """Particle-count refinement against a fine-grid reference.

    For each dyadic exponent the particle run is compared at ``t_probe``
    with one fixed fine Godunov solution; the observed order is the log2
    ratio of consecutive errors.
    """
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("refinement exponents must be increasing")
    if min(n_list) < 2:
        raise ValueError("need at least 4 particles (n >= 2)")

    times = (0.0, t_probe)
    reference = run_godunov(m, initial, reference_cells, t_probe,
                            snapshot_times=times)
    ref_density = reference.densities[-1]

    rows: list[ConvergenceRow] = []
    prev_err = None
    for n in n_list:
        cfg = integrator if integrator is not None else IntegratorConfig()
        cfg = IntegratorConfig(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol,
                               max_step=cfg.max_step,
                               event_time_tol=cfg.event_time_tol,
                               snapshot_times=times,
                               crossing_policy=cfg.crossing_policy)
        state = initial_state(m, atomize(initial, n))
        series, _ = integrate(m, state, t_probe, cfg)
        err = l1_distance(series.densities[-1], ref_density)
        order = None if prev_err is None else float(np.log2(prev_err / err))
        rows.append(ConvergenceRow(n, 2 ** n, float(err), order))
        prev_err = err
    return rows
