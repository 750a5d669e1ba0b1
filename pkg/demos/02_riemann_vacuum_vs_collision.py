"""Jump data: vacuum formation versus turning-point collision.

For a jump (rho_minus, rho_plus) with rho_minus < rho_plus the turning
point starts at the closed-form position (c(rho_plus) - c(rho_minus)) /
(2 c(rho_plus)) and initially drifts left.  The sign of the collision
indicator F decides what follows:

* F(0.45, 0.55) > 0 -- the turning point never catches its neighbours
  and a vacuum region opens around it;
* F(0.1, 0.9) < 0 -- it collides with its left neighbour and particles
  start switching direction (mass transfer).
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from hughes1d import (atomize_riemann, initial_state, integrate,
                      linear_reciprocal, riemann_collision_indicator,
                      riemann_initial_xi)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

model = linear_reciprocal(0.99)

cases = {
    "mild jump 0.45 / 0.55": (0.45, 0.55, 90, 110),
    "steep jump 0.1 / 0.9": (0.1, 0.9, 20, 180),
}

fig, axes = plt.subplots(2, 3, figsize=(13, 6))
for row, (label, (rm, rp, n_minus, n_plus)) in enumerate(cases.items()):
    xi0 = riemann_initial_xi(model, rm, rp)
    indicator = riemann_collision_indicator(model, rm, rp)
    print(f"{label}: xi_bar = {xi0:.6f}, F = {indicator:+.4f} "
          f"({'no collision' if indicator > 0 else 'collision predicted'})")

    state = initial_state(model, atomize_riemann(rm, rp, n_minus, n_plus))
    series, events = integrate(model, state, 1.0)
    print(f"  run to t=1: {len(events)} crossing events"
          + (f", first at t = {events[0].time:.4f}" if events else ""))

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
        ax.set_title(f"{label}, t = {series.times[i]:.2f}", fontsize=9)

fig.tight_layout()
fig.savefig(OUT / "riemann_dichotomy.png", dpi=130)
print(f"wrote {OUT / 'riemann_dichotomy.png'}")
