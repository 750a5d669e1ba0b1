"""Follow-the-leader particle system with a moving turning point.

Particles left of the turning point follow a backward chain towards the
left exit, particles right of it a forward chain towards the right exit;
the outermost particle of each group is a free leader moving at maximal
speed.  The turning point itself is not an ODE unknown: it is recomputed
after every accepted step from the cost balance of the reconstructed
density (with the straddling gap counted as vacuum).

Integration uses an embedded explicit Runge-Kutta 3(2) pair with PI step
control.  Turning-point/particle collisions are located by bisecting the
cubic Hermite interpolant of the accepted step down to a time tolerance,
and the configured crossing policy decides how the run continues.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .atomize import ParticleConfiguration, discrete_density
from .density import PiecewiseConstantDensity
from .errors import OrderingError, StepSizeError
from .model import ModelFunctions
from .series import FTL, SnapshotSeries
from .turning import TurningPointSolution, solve_turning_point

LEFT_NEIGHBOR = "left-neighbor"
RIGHT_NEIGHBOR = "right-neighbor"

POLICY_SWITCH = "switch"
POLICY_HALT = "halt"

_MIN_STEP_FACTOR = 1e-14


@dataclass
class ParticleState:
    """Particle positions plus the direction split and turning point.

    Particles ``0 .. split_index`` are left-movers, the rest right-movers;
    ``split_index`` may be ``-1`` (everybody heads right) or ``N`` (left).
    ``xi_bar`` keeps the balance point of the raw initial reconstruction,
    which in general differs from the ``xi`` computed with the straddling
    gap counted as vacuum.
    """

    time: float
    positions: np.ndarray
    split_index: int
    mass_m: float
    xi: float
    xi_bar: float | None = None
    terminal: bool = False

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        if np.any(np.diff(self.positions) <= 0.0):
            raise OrderingError("particle positions must be strictly increasing")
        if not -1 <= self.split_index <= self.positions.size - 1:
            raise ValueError(f"split index {self.split_index} out of range")

    @property
    def num_particles(self) -> int:
        return int(self.positions.size)

    @property
    def directions(self) -> np.ndarray:
        """-1 for left-movers, +1 for right-movers."""
        d = np.ones(self.positions.size, dtype=int)
        d[:self.split_index + 1] = -1
        return d

    def copy(self) -> "ParticleState":
        return replace(self, positions=self.positions.copy())


@dataclass(frozen=True)
class CrossingEvent:
    """A turning-point/particle collision located in time."""

    time: float
    particle_index: int
    side: str
    xi_at_event: float
    relative_speed: float


@dataclass
class IntegratorConfig:
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    max_step: float = 0.02
    event_time_tol: float = 1e-8
    snapshot_count: int = 21
    snapshot_times: Sequence[float] | None = None
    crossing_policy: str = POLICY_SWITCH

    def __post_init__(self):
        if self.crossing_policy not in (POLICY_SWITCH, POLICY_HALT):
            raise ValueError(f"unknown crossing policy {self.crossing_policy!r}")
        if self.snapshot_times is None and self.snapshot_count < 2:
            raise ValueError("need at least two snapshots")


def reconstruction(positions: np.ndarray, split_index: int,
                   mass: float) -> PiecewiseConstantDensity:
    """Density carried by the particles, vacuum on the straddling gap."""
    values = mass / np.diff(positions)
    if 0 <= split_index < values.size:
        values[split_index] = 0.0
    return PiecewiseConstantDensity(positions, values)


def initial_state(m: ModelFunctions,
                  config: ParticleConfiguration) -> ParticleState:
    """Split an atomized configuration into the two directed groups.

    The pair (split index, turning point) must be self-consistent: with
    the straddling gap counted as vacuum, the balance point has to fall
    inside that same gap.  Walking the candidate gap towards the balance
    point converges because swapping the vacuum gap only ever raises the
    left-minus-right cost excess; when the walk cycles between two gaps
    the balance sits exactly on the particle separating them, and that
    particle is removed.  The balance point of the full reconstruction
    (no vacuum gap) is kept on the state as ``xi_bar``; it generally
    differs from the vacuum-consistent ``xi``.
    """
    cfg = config

    def zero_gap_solve(c: ParticleConfiguration, gap: int) -> TurningPointSolution:
        return solve_turning_point(m, reconstruction(c.positions.copy(), gap,
                                                     c.mass_m))

    while True:
        pos = cfg.positions
        n_gaps = cfg.num_gaps
        full = solve_turning_point(m, discrete_density(cfg))
        g = int(np.searchsorted(pos, full.xi, side="right")) - 1
        g = min(max(g, 0), n_gaps - 1)

        remove_index = None
        last_move = 0
        for _ in range(pos.size + 1):
            sol = zero_gap_solve(cfg, g)
            if sol.xi < pos[g] and g > 0:
                if last_move == 1:
                    remove_index = g
                    break
                g -= 1
                last_move = -1
            elif sol.xi > pos[g + 1] and g < n_gaps - 1:
                if last_move == -1:
                    remove_index = g + 1
                    break
                g += 1
                last_move = 1
            else:
                near = np.abs(pos - sol.xi) <= 1e-12
                idx = int(np.argmax(near)) if np.any(near) else None
                if idx is not None and 0 < idx < pos.size - 1:
                    remove_index = idx
                    break
                if sol.xi <= pos[0]:
                    g = -1
                elif sol.xi >= pos[-1]:
                    g = n_gaps
                return ParticleState(time=0.0, positions=pos.copy(),
                                     split_index=g, mass_m=cfg.mass_m,
                                     xi=sol.xi, xi_bar=full.xi)
        if remove_index is None:
            raise OrderingError("self-consistent turning point search failed")
        cfg = cfg.remove_particle(remove_index)


def _rhs(m: ModelFunctions, positions: np.ndarray, split_index: int,
         mass: float) -> np.ndarray:
    """Particle speeds; total on any input (trial Runge-Kutta states may
    momentarily violate ordering, so gap densities are clamped to [0, 1])."""
    n = positions.size - 1
    gaps = np.maximum(np.diff(positions), 1e-300)
    rho = np.minimum(mass / gaps, 1.0)
    speeds = np.empty(n + 1)
    i0 = split_index
    if i0 >= 0:
        left_rho = np.concatenate(([0.0], rho[:i0]))
        speeds[:i0 + 1] = -np.asarray(m._v(left_rho))
    if i0 < n:
        right_rho = np.concatenate((rho[i0 + 1:], [0.0]))
        speeds[i0 + 1:] = np.asarray(m._v(right_rho))
    return speeds


def ftl_rhs(m: ModelFunctions, state: ParticleState) -> np.ndarray:
    """Speeds of all particles at the current state."""
    if np.any(np.diff(state.positions) <= 0.0):
        raise OrderingError("particle ordering violated")
    return _rhs(m, state.positions, state.split_index, state.mass_m)


def apply_crossing_policy(state: ParticleState, event: CrossingEvent,
                          policy: str = POLICY_SWITCH) -> ParticleState:
    """Continue or stop after a collision.

    Under ``"switch"`` the crossed particle joins the other group (the
    split index moves by one); under ``"halt"`` the state is returned
    unchanged with its terminal flag set.  The turning point carried by
    the returned state is stale until the caller re-solves the balance.
    """
    out = state.copy()
    if policy == POLICY_HALT:
        out.terminal = True
        return out
    if policy != POLICY_SWITCH:
        raise ValueError(f"unknown crossing policy {policy!r}")
    if event.side == LEFT_NEIGHBOR:
        out.split_index = state.split_index - 1
    elif event.side == RIGHT_NEIGHBOR:
        out.split_index = state.split_index + 1
    else:
        raise ValueError(f"unknown event side {event.side!r}")
    if np.any(np.diff(out.positions) <= 0.0):
        raise OrderingError("ordering broken at direction switch")
    return out


def _bs23(m, y, i0, mass, h, k1):
    """One Bogacki-Shampine 3(2) step; returns state, FSAL slope, error."""
    k2 = _rhs(m, y + (0.5 * h) * k1, i0, mass)
    k3 = _rhs(m, y + (0.75 * h) * k2, i0, mass)
    y_new = y + (h / 9.0) * (2.0 * k1 + 3.0 * k2 + 4.0 * k3)
    k4 = _rhs(m, y_new, i0, mass)
    err = h * (-5.0 / 72.0 * k1 + k2 / 12.0 + k3 / 9.0 - k4 / 8.0)
    return y_new, k4, err


def _hermite(y0, f0, y1, f1, h, theta):
    t2 = theta * theta
    a = (1.0 - theta) ** 2 * (1.0 + 2.0 * theta)
    b = t2 * (3.0 - 2.0 * theta)
    c = theta * (1.0 - theta) ** 2 * h
    d = t2 * (theta - 1.0) * h
    return a * y0 + b * y1 + c * f0 + d * f1


def integrate(m: ModelFunctions, state: ParticleState, t_end: float,
              cfg: IntegratorConfig | None = None
              ) -> tuple[SnapshotSeries, list[CrossingEvent]]:
    """Advance the particle system to ``t_end``.

    Snapshots are taken exactly at the configured times (steps are clamped
    so they land on them).  After each accepted step the turning point is
    re-solved; a sign change of its distance to either neighbour particle
    is bisected in time on the Hermite interpolant and handed to the
    crossing policy.  Collision detection is directional: only fresh
    positive-to-nonpositive transitions fire, so the discontinuous jump of
    the balance point at a switch (the vacuum gap moves with the split
    index) cannot retrigger the event it came from.
    """
    cfg = cfg if cfg is not None else IntegratorConfig()
    if t_end <= state.time:
        raise ValueError("t_end must exceed the state time")

    if cfg.snapshot_times is not None:
        targets = np.asarray(cfg.snapshot_times, dtype=float)
        if np.any(np.diff(targets) <= 0.0):
            raise ValueError("snapshot times must be strictly increasing")
        if targets.size and (targets[0] < state.time - 1e-12
                             or targets[-1] > t_end + 1e-12):
            raise ValueError("snapshot times outside the integration window")
    else:
        targets = np.linspace(state.time, t_end, cfg.snapshot_count)

    y = state.positions.astype(float).copy()
    i0 = state.split_index
    mass = state.mass_m
    n = y.size - 1
    t = state.time

    rec_times: list[float] = []
    rec_dens: list[PiecewiseConstantDensity] = []
    rec_xi: list[float] = []
    rec_pos: list[np.ndarray] = []
    rec_mass: list[float] = []
    rec_max: list[float] = []
    rec_res: list[float] = []
    events: list[CrossingEvent] = []

    def solve_xi(y_, i0_) -> TurningPointSolution:
        return solve_turning_point(m, reconstruction(y_.copy(), i0_, mass))

    def record(time_, y_, i0_, sol: TurningPointSolution):
        dens = reconstruction(y_.copy(), i0_, mass).clip(-1.0, 1.0).pad_to(-1.0, 1.0)
        rec_times.append(float(time_))
        rec_dens.append(dens)
        rec_xi.append(sol.xi)
        rec_pos.append(y_.copy())
        rec_mass.append(dens.mass())
        rec_max.append(float(np.max(dens.values)))
        rec_res.append(sol.residual)

    def gaps_to_neighbors(y_, i0_, xi_):
        gm = xi_ - y_[i0_] if 0 <= i0_ <= n else np.inf
        gp = y_[i0_ + 1] - xi_ if -1 <= i0_ < n else np.inf
        return gm, gp

    sol = solve_xi(y, i0)
    xi = sol.xi
    gm, gp = gaps_to_neighbors(y, i0, xi)

    next_target = 0
    while next_target < targets.size and targets[next_target] <= t + 1e-12:
        record(targets[next_target], y, i0, sol)
        next_target += 1

    terminal = False
    h = min(cfg.max_step, (t_end - state.time) / 50.0)
    k1 = None
    err_prev = None

    while t < t_end - 1e-14 and not terminal:
        stop = t_end if next_target >= targets.size else min(t_end, targets[next_target])
        h_try = min(h, cfg.max_step, stop - t)
        if h_try < _MIN_STEP_FACTOR * max(1.0, abs(t)):
            raise StepSizeError(
                f"step size underflow at t={t}",
                state=ParticleState(t, y.copy(), i0, mass, xi, state.xi_bar))
        if k1 is None:
            k1 = _rhs(m, y, i0, mass)
        y_new, k4, err_vec = _bs23(m, y, i0, mass, h_try, k1)
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        ordered = bool(np.all(np.diff(y_new) > 0.0))
        if err > 1.0 or not ordered:
            shrink = 0.25 if not ordered else max(0.1, 0.9 * err ** (-1.0 / 3.0))
            h = h_try * min(0.9, shrink)
            err_prev = None
            continue

        t_new = t + h_try
        if stop - t_new <= 1e-13 * max(1.0, abs(stop)):
            t_new = stop
        sol_new = solve_xi(y_new, i0)
        gm_new, gp_new = gaps_to_neighbors(y_new, i0, sol_new.xi)
        fired = []
        if gm > 0.0 and gm_new <= 0.0:
            fired.append(LEFT_NEIGHBOR)
        if gp > 0.0 and gp_new <= 0.0:
            fired.append(RIGHT_NEIGHBOR)

        if fired:
            def g_of(theta, side):
                y_th = _hermite(y, k1, y_new, k4, h_try, theta)
                s_th = solve_xi(y_th, i0)
                if side == LEFT_NEIGHBOR:
                    return s_th.xi - y_th[i0]
                return y_th[i0 + 1] - s_th.xi

            def locate(side):
                lo, hi = 0.0, 1.0
                while (hi - lo) * h_try > cfg.event_time_tol:
                    mid = 0.5 * (lo + hi)
                    if g_of(mid, side) > 0.0:
                        lo = mid
                    else:
                        hi = mid
                return hi

            side, theta = min(((s, locate(s)) for s in fired),
                              key=lambda item: item[1])
            t_ev = t + theta * h_try
            y_ev = _hermite(y, k1, y_new, k4, h_try, theta)
            sol_ev = solve_xi(y_ev, i0)
            neighbor = i0 if side == LEFT_NEIGHBOR else i0 + 1
            dtheta = min(theta, max(cfg.event_time_tol, 1e-7) / h_try)
            if dtheta > 0.0:
                y_b = _hermite(y, k1, y_new, k4, h_try, theta - dtheta)
                xi_dot = (sol_ev.xi - solve_xi(y_b, i0).xi) / (dtheta * h_try)
            else:
                xi_dot = np.nan
            neighbor_speed = _rhs(m, y_ev, i0, mass)[neighbor]
            event = CrossingEvent(time=float(t_ev), particle_index=int(neighbor),
                                  side=side, xi_at_event=float(sol_ev.xi),
                                  relative_speed=float(xi_dot - neighbor_speed))
            events.append(event)

            t = t_ev
            y = y_ev
            if cfg.crossing_policy == POLICY_HALT:
                if not rec_times or t > rec_times[-1] + 1e-12:
                    record(t, y, i0, sol_ev)
                terminal = True
                break
            i0 += -1 if side == LEFT_NEIGHBOR else 1
            sol = solve_xi(y, i0)
            xi = sol.xi
            gm, gp = gaps_to_neighbors(y, i0, xi)
            while next_target < targets.size and targets[next_target] <= t + 1e-12:
                record(targets[next_target], y, i0, sol)
                next_target += 1
            k1 = None
            err_prev = None
            continue

        t = t_new
        y = y_new
        k1 = k4
        sol = sol_new
        xi = sol.xi
        gm, gp = gm_new, gp_new
        while next_target < targets.size and targets[next_target] <= t + 1e-12:
            record(targets[next_target], y, i0, sol)
            next_target += 1

        if err == 0.0:
            fac = 5.0
        elif err_prev is None:
            fac = 0.9 * err ** (-1.0 / 3.0)
        else:
            fac = 0.9 * err ** (-0.7 / 3.0) * err_prev ** (0.4 / 3.0)
        h = h_try * min(5.0, max(0.2, fac))
        err_prev = err

    series = SnapshotSeries(
        method=FTL,
        times=np.array(rec_times),
        densities=rec_dens,
        xi_history=np.array(rec_xi),
        events=events,
        positions=rec_pos,
        inside_mass=np.array(rec_mass),
        max_density=np.array(rec_max),
        cost_residual=np.array(rec_res),
        meta={"num_particles": n + 1, "mass_m": mass,
              "policy": cfg.crossing_policy, "xi_bar": state.xi_bar,
              "terminated_by_event": terminal,
              "final_split_index": i0},
    )
    return series, events


@dataclass(frozen=True)
class EvacuationReport:
    times: np.ndarray
    inside_count: np.ndarray | None
    inside_mass: np.ndarray
    clearance_time: float | None
    mass_threshold: float


def evacuation_metrics(series: SnapshotSeries,
                       mass_threshold: float = 1e-9) -> EvacuationReport:
    """In-domain headcount and mass over time, plus the clearance time.

    The clearance time is the first snapshot time at which the in-domain
    mass drops below ``mass_threshold`` (``None`` if it never does).
    """
    if series.inside_mass is None:
        raise ValueError("series carries no mass diagnostics")
    inside_count = None
    if series.positions is not None:
        inside_count = np.array([
            int(np.count_nonzero((p >= -1.0) & (p <= 1.0)))
            for p in series.positions])
    below = np.nonzero(series.inside_mass < mass_threshold)[0]
    clearance = float(series.times[below[0]]) if below.size else None
    return EvacuationReport(series.times.copy(), inside_count,
                            series.inside_mass.copy(), clearance,
                            mass_threshold)
