"""Analytic certificates: when is the evolution provably collision-free?

The a-priori bound on the turning-point speed is
Q = (v_max / 2) (L TV + 3 C) with L and C derived from the cost map on
[0, rho_max].  If Q < v(rho_max) no particle can ever meet the turning
curve.  With the classical cost 1/(1 - rho) the zero-variation version
of the bound holds only for rho_max below roughly 0.265; the script
locates that threshold and then verifies the cone bound on an actual
run.
"""

import numpy as np

from hughes1d import (PiecewiseConstantDensity, atomize, check_theorem2,
                      cone_speed, critical_rho_max, initial_state, integrate,
                      linear_reciprocal, total_variation)

crit = critical_rho_max(linear_reciprocal(0.99))
print(f"critical rho_max for the reciprocal/linear pair: {crit:.6f}")

print("\nrho_max  L          C        Q(TV=0)   v(rho_max)  certified")
for rho_max in (0.1, 0.2, 0.26, 0.3, 0.5):
    m = linear_reciprocal(rho_max)
    d = m.derived_constants()
    q0 = cone_speed(m, 0.0)
    ok, _ = check_theorem2(m, 0.0)
    print(f"{rho_max:7.2f}  {d.lipschitz_L:9.5f}  {d.big_C:7.4f}  "
          f"{q0:8.5f}  {m.velocity(rho_max):10.5f}  {'yes' if ok else 'no'}")

model = linear_reciprocal(0.2)
datum = PiecewiseConstantDensity.from_segments(
    [(-0.9, 0.0, 0.15), (0.0, 0.9, 0.2)])
tv = total_variation(datum)
ok, margin = check_theorem2(model, tv)
q = cone_speed(model, tv)
print(f"\ntwo-block datum: TV = {tv:.3f}, Q = {q:.5f}, "
      f"margin = {margin:.5f} -> {'certified' if ok else 'not certified'}")

state = initial_state(model, atomize(datum, 7))
series, events = integrate(model, state, 1.0)
drift = np.abs(series.xi_history - series.xi_history[0])
print(f"run to t=1: {len(events)} crossings, "
      f"max |xi(t) - xi(0)| = {drift.max():.5f} "
      f"<= Q * t = {q * series.times[-1]:.5f}")
