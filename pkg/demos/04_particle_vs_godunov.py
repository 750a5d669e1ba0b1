"""Particle scheme against the Godunov reference, plus refinement.

The two solvers discretize the same flux law in completely different
ways (Lagrangian equal-mass particles vs. Eulerian cell averages), so
their pointwise-in-time L1 distance is an honest two-sided error
indicator.  Refining the particle count shrinks the distance at the
expected first-order rate.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from hughes1d import (PiecewiseConstantDensity, atomize_riemann,
                      compare_methods, convergence_study, initial_state,
                      integrate, linear_reciprocal, run_godunov)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

model = linear_reciprocal(0.99)
datum = PiecewiseConstantDensity.from_segments(
    [(-1.0, 0.0, 0.3), (0.0, 1.0, 0.7)])

fig, axes = plt.subplots(1, 2, figsize=(11, 3.6), sharey=True)
for ax, (n_minus, n_plus, cells) in zip(axes, ((60, 140, 200),
                                               (300, 700, 1000))):
    state = initial_state(model, atomize_riemann(0.3, 0.7, n_minus, n_plus))
    ftl_series, _ = integrate(model, state, 1.0)
    god_series = run_godunov(model, datum, cells, 1.0)
    report = compare_methods(ftl_series, god_series)
    n_total = n_minus + n_plus
    print(f"N = {n_total:4d}: L1 distance at t=1 is "
          f"{report.l1_density[-1]:.5f}, sup |xi gap| = "
          f"{report.sup_xi_distance:.5f}")

    fd, gd = ftl_series.densities[-1], god_series.densities[-1]
    ax.stairs(gd.values, gd.breakpoints, color="royalblue", lw=1.0,
              label="godunov")
    ax.stairs(fd.values, fd.breakpoints, color="crimson", lw=1.0,
              label="particles")
    ax.set_title(f"t = 1, N = {n_total}")
    ax.legend()

fig.tight_layout()
fig.savefig(OUT / "method_comparison.png", dpi=130)
print(f"wrote {OUT / 'method_comparison.png'}")

print("\nrefinement against a 2000-cell reference (constant datum 0.25):")
quarter = PiecewiseConstantDensity.from_segments([(-1.0, 1.0, 0.25)])
rows = convergence_study(model, quarter, [4, 5, 6, 7, 8], 1.0)
for row in rows:
    order = "-" if row.observed_order is None else f"{row.observed_order:.2f}"
    print(f"  N = {row.num_gaps:4d}: L1 = {row.l1_error:.6f}  order {order}")

fig2, ax = plt.subplots(figsize=(4.8, 3.4))
ax.loglog([r.num_gaps for r in rows], [r.l1_error for r in rows], "o-",
          color="crimson", label="measured")
ns = np.array([r.num_gaps for r in rows], dtype=float)
ax.loglog(ns, rows[0].l1_error * ns[0] / ns, "--", color="0.6",
          label="first order")
ax.set_xlabel("particle count N")
ax.set_ylabel("L1 error at t = 1")
ax.legend()
fig2.tight_layout()
fig2.savefig(OUT / "convergence.png", dpi=130)
print(f"wrote {OUT / 'convergence.png'}")
