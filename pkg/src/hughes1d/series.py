"""Time-stamped run output shared by the particle and grid solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .density import PiecewiseConstantDensity

FTL = "ftl"
GODUNOV = "godunov"


@dataclass
class SnapshotSeries:
    """Sequence of reconstructed densities with turning-point history.

    ``densities`` are restrictions to [-1, 1]; ``positions`` holds the raw
    particle positions for the particle method (``None`` per snapshot for
    the grid method).  Diagnostics are parallel arrays: in-domain mass,
    maximal density value, cost-balance residual of the turning-point
    solve and (grid method only) the cumulative mass that left through
    the exits.
    """

    method: str
    times: np.ndarray
    densities: list[PiecewiseConstantDensity]
    xi_history: np.ndarray
    events: list = field(default_factory=list)
    positions: list | None = None
    inside_mass: np.ndarray | None = None
    max_density: np.ndarray | None = None
    cost_residual: np.ndarray | None = None
    boundary_outflux: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.xi_history = np.asarray(self.xi_history, dtype=float)
        if self.times.size != len(self.densities):
            raise ValueError("one density per snapshot time required")
        if self.times.size != self.xi_history.size:
            raise ValueError("one turning point per snapshot time required")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("snapshot times must be strictly increasing")
        if np.any(np.abs(self.xi_history) >= 1.0):
            raise ValueError("turning point history must stay inside (-1, 1)")

    def __len__(self) -> int:
        return int(self.times.size)
