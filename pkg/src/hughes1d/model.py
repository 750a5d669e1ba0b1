"""Velocity and running-cost maps of the two-exit corridor model.

The model is specified by a pair of maps on the density ``rho``:

* a velocity ``v`` that is C1, strictly decreasing, with ``v(1) = 0`` and
  ``v(0) = v_max > 0``, such that the flux ``f(rho) = rho * v(rho)`` is
  unimodal with a unique stagnation density ``rho_hat`` where ``f' = 0``;
* a running cost ``c`` that is C2, increasing and convex with ``c(0) = 1``,
  finite on ``[0, rho_max]``.

Built-in choices are the linear velocity ``v = 1 - rho`` and the costs
``c = 1/v`` (which blows up at ``rho = 1``, hence requires ``rho_max < 1``)
and ``c = 1``.  User-defined maps are restricted to polynomials whose
monotonicity/convexity is validated on a sampling grid.

All evaluators accept scalars or numpy arrays and are vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import optimize

from .errors import DomainError, ModelError

LINEAR = "linear"
POLYNOMIAL = "polynomial"
RECIPROCAL = "reciprocal"
CONSTANT = "constant"

VELOCITY_KINDS = (LINEAR, POLYNOMIAL)
COST_KINDS = (RECIPROCAL, CONSTANT, POLYNOMIAL)

#: slack allowed on density range checks (ODE steps produce roundoff-level
#: excursions outside the admissible interval)
DOMAIN_TOL = 1e-12

_VALIDATION_GRID = 2001


@dataclass(frozen=True)
class DerivedConstants:
    """Scalar quantities derived from the cost map on ``[0, rho_max]``.

    ``upsilon_at`` evaluates ``c(rho) - c'(rho) * rho``, the quantity whose
    telescoping sums drive the turning-point velocity.  ``lipschitz_L`` is
    its Lipschitz constant ``max{c''(rho) * rho}`` and ``big_C`` is
    ``c'(rho_max) * rho_max``.
    """

    upsilon_at: Callable[[float], float]
    lipschitz_L: float
    big_C: float


@dataclass(frozen=True)
class ModelFunctions:
    """Immutable bundle of the velocity/cost pair and derived scalars.

    Parameters
    ----------
    velocity_kind:
        ``"linear"`` for ``v = 1 - rho`` or ``"polynomial"`` with
        ``velocity_coeffs`` in increasing-degree order.
    cost_kind:
        ``"reciprocal"`` for ``c = 1/v``, ``"constant"`` for ``c = 1`` or
        ``"polynomial"`` with ``cost_coeffs``.
    rho_max:
        Largest density on which the cost is finite; must be below 1 for
        the reciprocal cost.
    """

    velocity_kind: str = LINEAR
    cost_kind: str = RECIPROCAL
    rho_max: float = 0.99
    velocity_coeffs: tuple[float, ...] | None = None
    cost_coeffs: tuple[float, ...] | None = None
    v_max: float = field(init=False)
    rho_hat: float = field(init=False)

    def __post_init__(self):
        if self.velocity_kind not in VELOCITY_KINDS:
            raise ModelError(f"unknown velocity kind {self.velocity_kind!r}")
        if self.cost_kind not in COST_KINDS:
            raise ModelError(f"unknown cost kind {self.cost_kind!r}")
        if not 0.0 < self.rho_max <= 1.0:
            raise ModelError(f"rho_max must lie in (0, 1], got {self.rho_max}")
        if self.cost_kind == RECIPROCAL and self.rho_max >= 1.0:
            raise ModelError("reciprocal cost requires rho_max < 1")
        if self.velocity_kind == POLYNOMIAL:
            if not self.velocity_coeffs:
                raise ModelError("polynomial velocity needs velocity_coeffs")
            object.__setattr__(self, "velocity_coeffs",
                               tuple(float(a) for a in self.velocity_coeffs))
        if self.cost_kind == POLYNOMIAL:
            if not self.cost_coeffs:
                raise ModelError("polynomial cost needs cost_coeffs")
            object.__setattr__(self, "cost_coeffs",
                               tuple(float(a) for a in self.cost_coeffs))
        self._validate_velocity()
        self._validate_cost()
        object.__setattr__(self, "v_max", float(self._v(0.0)))
        object.__setattr__(self, "rho_hat", self._find_rho_hat())

    # -- raw evaluators (no domain checks) ---------------------------------

    def _v(self, rho):
        if self.velocity_kind == LINEAR:
            return 1.0 - np.asarray(rho, dtype=float)
        return npoly.polyval(rho, self.velocity_coeffs)

    def _vp(self, rho):
        if self.velocity_kind == LINEAR:
            return np.full_like(np.asarray(rho, dtype=float), -1.0)
        return npoly.polyval(rho, npoly.polyder(self.velocity_coeffs))

    def _vpp(self, rho):
        if self.velocity_kind == LINEAR:
            return np.zeros_like(np.asarray(rho, dtype=float))
        return npoly.polyval(rho, npoly.polyder(self.velocity_coeffs, 2))

    def _c(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.cost_kind == CONSTANT:
            return np.ones_like(rho)
        if self.cost_kind == RECIPROCAL:
            return 1.0 / self._v(rho)
        return npoly.polyval(rho, self.cost_coeffs)

    def _cp(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.cost_kind == CONSTANT:
            return np.zeros_like(rho)
        if self.cost_kind == RECIPROCAL:
            v = self._v(rho)
            return -self._vp(rho) / v ** 2
        return npoly.polyval(rho, npoly.polyder(self.cost_coeffs))

    def _cpp(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.cost_kind == CONSTANT:
            return np.zeros_like(rho)
        if self.cost_kind == RECIPROCAL:
            v = self._v(rho)
            vp = self._vp(rho)
            return (2.0 * vp ** 2 - v * self._vpp(rho)) / v ** 3
        return npoly.polyval(rho, npoly.polyder(self.cost_coeffs, 2))

    # -- structural validation ---------------------------------------------

    def _validate_velocity(self):
        grid = np.linspace(0.0, 1.0, _VALIDATION_GRID)
        v = self._v(grid)
        if abs(float(self._v(1.0))) > 1e-9:
            raise ModelError("velocity must vanish at rho = 1")
        if float(self._v(0.0)) <= 0.0:
            raise ModelError("velocity must be positive at rho = 0")
        if np.any(self._vp(grid) >= 0.0):
            raise ModelError("velocity must be strictly decreasing on [0, 1]")
        if np.any(v[:-1] < -1e-12):
            raise ModelError("velocity must be nonnegative on [0, 1]")
        # flux unimodality: f' changes sign exactly once
        fp = v + grid * self._vp(grid)
        signs = np.sign(fp[np.abs(fp) > 1e-14])
        flips = np.count_nonzero(np.diff(signs))
        if flips != 1 or fp[0] <= 0.0:
            raise ModelError("flux rho*v(rho) must have a single interior maximum")

    def _validate_cost(self):
        if self.cost_kind == CONSTANT:
            return
        grid = np.linspace(0.0, self.rho_max, _VALIDATION_GRID)
        if abs(float(self._c(0.0)) - 1.0) > 1e-9:
            raise ModelError("cost must equal 1 at rho = 0")
        if np.any(self._cp(grid) < 0.0):
            raise ModelError("cost must be increasing on [0, rho_max]")
        if np.any(self._cpp(grid) <= 0.0):
            raise ModelError("cost must be strictly convex on [0, rho_max]")

    def _find_rho_hat(self) -> float:
        if self.velocity_kind == LINEAR:
            return 0.5
        fprime = lambda r: float(self._v(r) + r * self._vp(r))
        return float(optimize.bisect(fprime, 0.0, 1.0, xtol=1e-12))

    # -- domain handling -----------------------------------------------------

    def _admit(self, rho, upper: float, what: str):
        arr = np.asarray(rho, dtype=float)
        if np.any(arr < -DOMAIN_TOL) or np.any(arr > upper + DOMAIN_TOL):
            raise DomainError(
                f"{what} evaluated outside [0, {upper}]: "
                f"range [{np.min(arr)}, {np.max(arr)}]")
        return np.clip(arr, 0.0, upper)

    @staticmethod
    def _scalarize(template, out):
        return float(out) if np.ndim(template) == 0 else out

    # -- public evaluators ----------------------------------------------------

    def velocity(self, rho):
        """v(rho) on [0, 1]."""
        arr = self._admit(rho, 1.0, "velocity")
        return self._scalarize(rho, self._v(arr))

    def velocity_prime(self, rho):
        arr = self._admit(rho, 1.0, "velocity derivative")
        return self._scalarize(rho, self._vp(arr))

    def cost(self, rho):
        """c(rho) on [0, rho_max]; raises DomainError above rho_max."""
        arr = self._admit(rho, self.rho_max, "cost")
        return self._scalarize(rho, self._c(arr))

    def cost_prime(self, rho):
        arr = self._admit(rho, self.rho_max, "cost derivative")
        return self._scalarize(rho, self._cp(arr))

    def cost_second(self, rho):
        arr = self._admit(rho, self.rho_max, "cost second derivative")
        return self._scalarize(rho, self._cpp(arr))

    def flux(self, rho):
        """f(rho) = rho * v(rho)."""
        arr = self._admit(rho, 1.0, "flux")
        return self._scalarize(rho, arr * self._v(arr))

    def flux_prime(self, rho):
        arr = self._admit(rho, 1.0, "flux derivative")
        return self._scalarize(rho, self._v(arr) + arr * self._vp(arr))

    def upsilon(self, rho):
        """c(rho) - c'(rho) * rho, strictly decreasing from upsilon(0) = 1."""
        arr = self._admit(rho, self.rho_max, "upsilon")
        return self._scalarize(rho, self._c(arr) - self._cp(arr) * arr)

    def max_wave_speed(self) -> float:
        """Upper bound for |f'| on [0, 1], used by the CFL restriction."""
        grid = np.linspace(0.0, 1.0, _VALIDATION_GRID)
        return float(np.max(np.abs(self._v(grid) + grid * self._vp(grid))))

    def derived_constants(self) -> DerivedConstants:
        """Lipschitz constant of upsilon and the boundary-term constant.

        For the built-in reciprocal-over-linear pair both maxima are
        attained at ``rho_max`` and evaluated analytically; polynomial
        models are maximized by dense sampling plus golden-section
        refinement.
        """
        if self.cost_kind == CONSTANT:
            return DerivedConstants(self.upsilon, 0.0, 0.0)
        big_c = float(self._cp(self.rho_max)) * self.rho_max
        if self.cost_kind == RECIPROCAL and self.velocity_kind == LINEAR:
            r = self.rho_max
            lip = 2.0 * r / (1.0 - r) ** 3
        else:
            lip = self._maximize_on_range(lambda r: float(self._cpp(r)) * r)
        return DerivedConstants(self.upsilon, lip, big_c)

    def _maximize_on_range(self, g) -> float:
        grid = np.linspace(0.0, self.rho_max, _VALIDATION_GRID)
        vals = np.array([g(r) for r in grid])
        k = int(np.argmax(vals))
        if k in (0, len(grid) - 1):
            return float(vals[k])
        lo, hi = grid[k - 1], grid[k + 1]
        try:
            r_star = optimize.golden(lambda r: -g(r), brack=(lo, grid[k], hi),
                                     tol=1e-12)
        except ValueError:
            # flat bracket; the grid value is already the maximum
            return float(vals[k])
        return max(float(vals[k]), g(float(r_star)))


def linear_reciprocal(rho_max: float = 0.99) -> ModelFunctions:
    """The classical pair v = 1 - rho, c = 1/(1 - rho)."""
    return ModelFunctions(LINEAR, RECIPROCAL, rho_max)


def linear_constant_cost() -> ModelFunctions:
    """Linear velocity with unit cost: two decoupled LWR half-problems."""
    return ModelFunctions(LINEAR, CONSTANT, 1.0)
