"""Conversion of an initial density into equal-mass particles.

The particle set is obtained by inverting the cumulative mass of the
initial datum: consecutive particles always bracket exactly the mass
``m``.  For piecewise-constant data the inversion is in closed form, so
no quadrature error enters the construction.  Riemann data get a
dedicated uniform placement with an explicit particle count on each side
of the jump.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import PiecewiseConstantDensity
from .errors import AtomizationError

#: relative slack when deciding that a mass target falls on a piece boundary
_MASS_TIE_TOL = 1e-13


@dataclass(frozen=True)
class ParticleConfiguration:
    """Ordered particle positions with the common inter-particle mass.

    ``n_dyadic`` records the exponent when the gap count is the dyadic
    ``2**n`` of the refinement scheme; it is ``None`` for explicit counts
    (Riemann placement, direct particle numbers).
    """

    positions: np.ndarray
    mass_m: float
    n_dyadic: int | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 1 or pos.size < 2:
            raise AtomizationError("need at least two particles")
        if np.any(np.diff(pos) <= 0.0):
            raise AtomizationError("particle positions must be strictly increasing")
        if not self.mass_m > 0.0:
            raise AtomizationError("particle mass must be positive")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def num_gaps(self) -> int:
        return self.positions.size - 1

    def remove_particle(self, index: int) -> "ParticleConfiguration":
        """Drop one interior particle, merging its two gaps."""
        if not 0 < index < self.positions.size - 1:
            raise AtomizationError("only interior particles can be removed")
        return ParticleConfiguration(np.delete(self.positions, index),
                                     self.mass_m, self.n_dyadic)


def _invert_mass_targets(rho_bar: PiecewiseConstantDensity,
                         targets: np.ndarray) -> np.ndarray:
    bp = rho_bar.breakpoints
    vals = rho_bar.values
    piece_mass = vals * np.diff(bp)
    prefix = np.concatenate(([0.0], np.cumsum(piece_mass)))
    total = prefix[-1]
    tol = _MASS_TIE_TOL * max(total, 1.0)
    out = np.empty(targets.size)
    for k, target in enumerate(targets):
        j = int(np.searchsorted(prefix, target - tol, side="left"))
        j = min(j, prefix.size - 1)
        if prefix[j] <= target + tol:
            # target sits on a piece boundary: take the left endpoint of
            # the next positive-mass piece (vacuum plateaus carry nothing)
            i = j
            while i < vals.size and vals[i] <= 0.0:
                i += 1
            out[k] = bp[i] if i < vals.size else bp[j]
        else:
            out[k] = bp[j - 1] + (target - prefix[j - 1]) / vals[j - 1]
    return out


def atomize_count(rho_bar: PiecewiseConstantDensity,
                  num_gaps: int,
                  n_dyadic: int | None = None) -> ParticleConfiguration:
    """Place ``num_gaps + 1`` particles so each gap brackets mass M/num_gaps."""
    if num_gaps < 1:
        raise AtomizationError("need at least one inter-particle gap")
    total = rho_bar.mass()
    if total <= 0.0:
        raise AtomizationError("initial datum has zero mass")
    m = total / num_gaps
    targets = m * np.arange(1, num_gaps + 1, dtype=float)
    targets[-1] = total
    support_left = rho_bar.support[0]
    positions = np.concatenate(([support_left],
                                _invert_mass_targets(rho_bar, targets)))
    return ParticleConfiguration(positions, m, n_dyadic)


def atomize(rho_bar: PiecewiseConstantDensity, n: int) -> ParticleConfiguration:
    """Dyadic atomization with ``2**n`` gaps of mass ``2**-n * M``."""
    if n < 1:
        raise AtomizationError("dyadic exponent must be >= 1")
    return atomize_count(rho_bar, 2 ** n, n_dyadic=n)


def atomize_riemann(rho_minus: float, rho_plus: float,
                    n_minus: int, n_plus: int) -> ParticleConfiguration:
    """Uniform two-block placement for a jump datum.

    The left state occupies [-1, 0] with ``n_minus`` gaps of width
    ``1/n_minus``, the right state (0, 1] with ``n_plus`` gaps of width
    ``1/n_plus``; the common mass is ``m = rho_plus / n_plus`` and the
    quadruple must satisfy ``m * n_minus == rho_minus``.
    """
    if not 0.0 <= rho_minus < rho_plus <= 1.0:
        raise AtomizationError(
            f"need 0 <= rho_minus < rho_plus <= 1, got ({rho_minus}, {rho_plus})")
    if n_minus < 1 or n_plus < 1:
        raise AtomizationError("need at least one gap on each side")
    m = rho_plus / n_plus
    if abs(m * n_minus - rho_minus) > 1e-12:
        raise AtomizationError(
            f"incompatible Riemann quadruple: {rho_plus}/{n_plus} * {n_minus} "
            f"!= {rho_minus}")
    n_total = n_minus + n_plus
    positions = np.empty(n_total + 1)
    left = np.arange(n_minus + 1, dtype=float)
    positions[:n_minus + 1] = -1.0 + left / n_minus
    right = np.arange(n_plus + 1, dtype=float)
    positions[n_minus:] = 1.0 - (n_plus - right) / n_plus
    positions[n_minus] = 0.0
    return ParticleConfiguration(positions, m, None)


def discrete_density(p: ParticleConfiguration,
                     gap_zero_index: int | None = None) -> PiecewiseConstantDensity:
    """Reconstruct the density carried by a particle configuration.

    Gap ``i`` gets the value ``m / (x_{i+1} - x_i)``; the gap at
    ``gap_zero_index`` (the one straddling the turning point) is reported
    as vacuum, leaving total mass ``M - m``.
    """
    values = p.mass_m / np.diff(p.positions)
    if gap_zero_index is not None:
        if not 0 <= gap_zero_index < p.num_gaps:
            raise AtomizationError(f"gap index {gap_zero_index} out of range")
        values = values.copy()
        values[gap_zero_index] = 0.0
    return PiecewiseConstantDensity(p.positions, values)
