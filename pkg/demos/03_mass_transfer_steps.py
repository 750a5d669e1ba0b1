"""Mass transfer and the non-classical shock on a three-step crowd.

The three-block datum puts most of the cost on the right of the initial
turning point, so the turning point sweeps left through the middle
block.  Every particle it meets switches direction, which transports
mass across the turning curve; while that happens the reconstructed
density jumps across xi, a shock that does not satisfy the classical
Rankine-Hugoniot relation of either one-sided equation.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from hughes1d import (IntegratorConfig, PiecewiseConstantDensity,
                      atomize_count, initial_state, integrate,
                      linear_reciprocal)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

model = linear_reciprocal(0.99)
steps = PiecewiseConstantDensity.from_segments(
    [(-0.8, -0.5, 0.8), (-0.3, 0.3, 0.6), (0.4, 0.75, 0.9)])

state = initial_state(model, atomize_count(steps, 200))
series, events = integrate(model, state, 1.0,
                           IntegratorConfig(snapshot_count=41))

print(f"{len(events)} direction switches, between t = {events[0].time:.3f} "
      f"and t = {events[-1].time:.3f}")
print(f"split index moved {state.split_index} -> "
      f"{series.meta['final_split_index']} "
      f"({state.split_index - series.meta['final_split_index']} particles "
      f"changed direction)")

for t_probe in (0.2, 0.25):
    i = int(np.argmin(np.abs(series.times - t_probe)))
    xi = series.xi_history[i]
    dens = series.densities[i]
    jump = dens.value_at(xi - 0.03) - dens.value_at(xi + 0.03)
    print(f"t = {series.times[i]:.2f}: density jump across xi = {jump:+.3f}")

fig, axes = plt.subplots(1, 3, figsize=(13, 3.4), sharey=True)
for ax, t_show in zip(axes, (0.0, 0.25, 1.0)):
    i = int(np.argmin(np.abs(series.times - t_show)))
    dens = series.densities[i]
    ax.stairs(dens.values, dens.breakpoints, color="crimson", lw=1.2)
    ax.plot(series.positions[i],
            np.zeros_like(series.positions[i]) - 0.03, ".",
            color="navy", ms=2)
    ax.axvline(series.xi_history[i], color="magenta", lw=1)
    ax.set_ylim(-0.08, 1.0)
    ax.set_title(f"t = {series.times[i]:.2f}")
    ax.set_xlabel("x")

fig.tight_layout()
fig.savefig(OUT / "mass_transfer.png", dpi=130)

fig2, ax = plt.subplots(figsize=(6, 3.2))
ax.plot(series.times, series.xi_history, color="magenta")
for e in events:
    ax.axvline(e.time, color="0.85", lw=0.6, zorder=0)
ax.set_xlabel("t")
ax.set_ylabel("xi(t)")
ax.set_title("turning point trajectory (grey lines: switches)")
fig2.tight_layout()
fig2.savefig(OUT / "turning_point_trajectory.png", dpi=130)
print(f"wrote {OUT / 'mass_transfer.png'} and "
      f"{OUT / 'turning_point_trajectory.png'}")
