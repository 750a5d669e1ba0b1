"""Turning-point location, velocity and jump-datum closed forms.

The turning point is the position splitting the corridor into two groups
heading for opposite exits.  On any piecewise-constant density it is the
unique root of the cost balance

    integral of c(rho) over [-1, xi]  ==  integral over [xi, 1],

whose cumulative cost is continuous, strictly increasing and piecewise
linear, so the solve amounts to prefix sums and the exact inversion of a
single linear piece.  Only the part of the density inside [-1, 1] enters
the balance; vacuum carries cost c(0) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy import optimize

from .density import PiecewiseConstantDensity
from .errors import BracketingError, DomainError
from .model import ModelFunctions

if TYPE_CHECKING:  # pragma: no cover
    from .ftl import ParticleState

#: below this separation the turning point counts as sitting on a particle
COINCIDENCE_TOL = 1e-12


@dataclass(frozen=True)
class TurningPointSolution:
    """Root of the cost balance together with solve diagnostics.

    ``host_piece`` indexes the piece of the (padded) input density that
    contains ``xi``; ``coincides_with_particle`` flags a root within
    ``COINCIDENCE_TOL`` of a breakpoint, in which case the caller is
    expected to apply the particle-removal rule.
    """

    xi: float
    host_piece: int
    coincides_with_particle: bool
    residual: float


def solve_turning_point(m: ModelFunctions,
                        density: PiecewiseConstantDensity) -> TurningPointSolution:
    """Locate the cost-balance point of ``density`` on [-1, 1]."""
    clipped = density.clip(-1.0, 1.0).pad_to(-1.0, 1.0)
    bp = clipped.breakpoints
    costs = m.cost(clipped.values)
    costs = np.atleast_1d(costs)
    segment_costs = costs * np.diff(bp)
    prefix = np.concatenate(([0.0], np.cumsum(segment_costs)))
    total = prefix[-1]
    half = 0.5 * total
    j = int(np.searchsorted(prefix, half, side="right")) - 1
    j = min(max(j, 0), costs.size - 1)
    xi = float(bp[j] + (half - prefix[j]) / costs[j])
    xi = min(max(xi, -1.0), 1.0)
    residual = abs(2.0 * (prefix[j] + costs[j] * (xi - bp[j])) - total)
    coincides = bool(np.any(np.abs(density.breakpoints - xi) <= COINCIDENCE_TOL))
    return TurningPointSolution(xi, j, coincides, float(residual))


def riemann_initial_xi(m: ModelFunctions, rho_minus: float,
                       rho_plus: float) -> float:
    """Initial turning point of the jump datum, in closed form.

    For states ``rho_minus < rho_plus`` on [-1, 0] / (0, 1] the balance
    gives ``xi = (c(rho_plus) - c(rho_minus)) / (2 c(rho_plus))``, always
    inside (0, 1/2).
    """
    if not rho_minus < rho_plus:
        raise DomainError("jump datum requires rho_minus < rho_plus")
    c_minus = m.cost(rho_minus)
    c_plus = m.cost(rho_plus)
    return (c_plus - c_minus) / (2.0 * c_plus)


def riemann_collision_indicator(m: ModelFunctions, rho_minus: float,
                                rho_plus: float) -> float:
    """Sign certificate for turning-point/particle collisions.

    Positive values guarantee that the turning point of the jump datum
    never meets its neighbour particles; negative values predict a
    collision with the left neighbour.
    """
    if not rho_minus <= rho_plus:
        raise DomainError("indicator defined for rho_minus <= rho_plus")
    cp_m = m.cost_prime(rho_minus) * rho_minus
    cp_p = m.cost_prime(rho_plus) * rho_plus
    return (m.v_max * (cp_m - cp_p)
            + m.velocity(rho_minus) * (m.upsilon(rho_minus) - m.upsilon(rho_plus))
            + 2.0 * m.velocity(rho_plus))


def cone_speed(m: ModelFunctions, tv_initial: float) -> float:
    """A-priori bound on the turning-point speed for a given initial TV."""
    if tv_initial < 0.0:
        raise ValueError("total variation must be nonnegative")
    d = m.derived_constants()
    return 0.5 * m.v_max * (d.lipschitz_L * tv_initial + 3.0 * d.big_C)


def check_theorem2(m: ModelFunctions, tv_initial: float) -> tuple[bool, float]:
    """Global-existence smallness test: cone speed below v(rho_max).

    Returns the verdict together with the margin
    ``v(rho_max) - cone_speed``; requires ``rho_max < 1`` so the margin
    target is positive.
    """
    if m.rho_max >= 1.0:
        raise DomainError("smallness condition needs rho_max < 1")
    margin = m.velocity(m.rho_max) - cone_speed(m, tv_initial)
    return bool(margin > 0.0), float(margin)


def critical_rho_max(m: ModelFunctions, tol: float = 1e-8) -> float | None:
    """Largest admissible density for which the TV = 0 smallness bound holds.

    Solves ``(3 v_max / 2) c'(r) r = v(r)`` by bisection; for the
    reciprocal-over-linear pair this is ``(3/2) r = (1 - r)**3`` with root
    near 0.265.  Returns ``None`` when there is no sign change in (0, 1)
    (the condition then holds for every admissible density, as for the
    constant cost).
    """
    def gap(r: float) -> float:
        return 1.5 * m.v_max * float(m._cp(r)) * r - float(m._v(r))

    lo, hi = 1e-12, 1.0 - 1e-9
    if gap(lo) >= 0.0 or gap(hi) <= 0.0:
        return None
    return float(optimize.bisect(gap, lo, hi, xtol=tol))


def _gap_density(positions: np.ndarray, mass: float, split_index: int,
                 gap: int) -> float:
    """Density of inter-particle gap ``gap``; the straddling gap and
    everything outside the particle range count as vacuum."""
    if gap < 0 or gap >= positions.size - 1 or gap == split_index:
        return 0.0
    return mass / (positions[gap + 1] - positions[gap])


def turning_point_velocity(m: ModelFunctions, state: "ParticleState") -> float:
    """Exact instantaneous speed of the turning point.

    Differentiates the discrete cost balance in time, which yields four
    boundary terms at the particles bracketing the exits plus two
    telescoping sums of ``upsilon`` differences over each group.  The
    formula needs the bracket pattern

        x[i_minus - 1] <= -1 < x[i_minus],
        x[i0] < xi < x[i0 + 1],
        x[i_plus] < 1 <= x[i_plus + 1],

    and no particle within ``COINCIDENCE_TOL`` of xi; otherwise a
    :class:`BracketingError` is raised.
    """
    x = state.positions
    i0 = state.split_index
    mass = state.mass_m
    xi = state.xi
    n_gaps = x.size - 1

    if np.any(np.abs(x - xi) <= COINCIDENCE_TOL):
        raise BracketingError("turning point currently sits on a particle")

    i_minus = int(np.searchsorted(x, -1.0, side="right"))
    i_plus = int(np.searchsorted(x, 1.0, side="left")) - 1
    if i_minus < 1 or i_minus > n_gaps:
        raise BracketingError("no particle pair brackets the left exit")
    if i_plus < 0 or i_plus >= n_gaps:
        raise BracketingError("no particle pair brackets the right exit")
    if not (0 <= i0 < n_gaps and x[i0] < xi < x[i0 + 1]):
        raise BracketingError("turning point is not inside the straddling gap")
    if not i_minus <= i0 <= i_plus:
        raise BracketingError("turning point outside the in-domain bracket range")

    def rho(gap: int) -> float:
        return _gap_density(x, mass, i0, gap)

    def v(gap: int) -> float:
        return m.velocity(rho(gap))

    def ups(gap: int) -> float:
        return m.upsilon(rho(gap))

    r_left = rho(i_minus - 1)
    left_boundary = ((v(i_minus - 2) - v(i_minus - 1))
                     * (x[i_minus] + 1.0) / (x[i_minus] - x[i_minus - 1])
                     + v(i_minus - 1)) * m.cost_prime(r_left) * r_left

    r_right = rho(i_plus)
    right_boundary = (v(i_plus)
                      + (v(i_plus + 1) - v(i_plus))
                      * (1.0 - x[i_plus]) / (x[i_plus + 1] - x[i_plus])
                      ) * m.cost_prime(r_right) * r_right

    left_sum = sum(v(i - 1) * (ups(i - 1) - ups(i)) for i in range(i_minus, i0))
    right_sum = sum(v(i) * (ups(i - 1) - ups(i)) for i in range(i0 + 2, i_plus + 1))

    total = (left_boundary
             - v(i0 - 1) * (1.0 - ups(i0 - 1))
             + left_sum
             + v(i0 + 1) * (1.0 - ups(i0 + 1))
             + right_sum
             - right_boundary)
    return 0.5 * total
