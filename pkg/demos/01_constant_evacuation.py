"""Evacuation of a uniformly filled corridor.

Two constant initial crowds, a light one (0.25) and a dense one (0.6),
split at the centre and leave through the exits at x = -1 and x = 1.
For the light crowd the boundary rarefactions exit quickly and three
constant states remain inside; for the dense crowd the rarefaction fans
stay inside and the density right at the exits settles near the
stagnation value 1/2, where the outflux rho * v(rho) is maximal.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from hughes1d import (atomize_count, evacuation_metrics, initial_state,
                      integrate, linear_reciprocal, run_godunov,
                      PiecewiseConstantDensity)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

model = linear_reciprocal(0.99)

fig, axes = plt.subplots(2, 3, figsize=(13, 6), sharey="row")
for row, value in enumerate((0.25, 0.6)):
    datum = PiecewiseConstantDensity.from_segments([(-1.0, 1.0, value)])
    state = initial_state(model, atomize_count(datum, 200))
    series, events = integrate(model, state, 1.0)
    assert not events, "constant data never produce crossings"

    report = evacuation_metrics(series)
    print(f"rho = {value}: inside mass {report.inside_mass[0]:.3f} -> "
          f"{report.inside_mass[-1]:.3f}, "
          f"turning point pinned at |xi| <= "
          f"{np.max(np.abs(series.xi_history)):.1e}")

    trace = series.densities[-1].value_at(1.0 - 1e-9)
    print(f"  exit trace at t=1: {trace:.3f} "
          f"(stagnation density is {model.rho_hat})")

    for col, t_show in enumerate((0.0, 0.5, 1.0)):
        i = int(np.argmin(np.abs(series.times - t_show)))
        dens = series.densities[i]
        ax = axes[row, col]
        ax.stairs(dens.values, dens.breakpoints, color="crimson", lw=1.2)
        ax.plot(series.positions[i],
                np.zeros_like(series.positions[i]) - 0.03, ".",
                color="navy", ms=2)
        ax.axvline(series.xi_history[i], color="magenta", lw=1)
        ax.set_ylim(-0.08, 1.0)
        ax.set_title(f"rho0 = {value}, t = {series.times[i]:.2f}")
        ax.set_xlabel("x")

fig.tight_layout()
fig.savefig(OUT / "constant_evacuation.png", dpi=130)
print(f"wrote {OUT / 'constant_evacuation.png'}")

# the grid solver tells the same story on the dense crowd
god = run_godunov(model, PiecewiseConstantDensity.from_segments(
    [(-1.0, 1.0, 0.6)]), 200, 1.0)
print(f"godunov exit trace at t=1: {god.densities[-1].values[-1]:.3f}")
