"""Trap fields, evolution matrices, stability and loops.

Walks through the dynamics layer: build elastic fields, integrate the
canonical evolution matrix, classify the motion by its trace, and test
for evolution loops.
"""
import pathlib

import numpy as np

import trapml as tm
from trapml.presets import DEFAULT_INTERVAL, reference_field

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# --- three ways to build a field -------------------------------------------
constant = tm.constant_field(1.0)
four_wave = reference_field()
magnetic = tm.field_from_magnetic_length(
    lambda t: 1.0 + 0.1 * np.cos(np.asarray(t, float)), scale=1.0)

print("field values at t = 0:")
for name, f in [("constant", constant), ("four-wave", four_wave),
                ("magnetic", magnetic)]:
    print(f"  {name:10s} beta(0) = {f.value(0.0):.6f}")

# --- integrate the evolution matrix -----------------------------------------
print("\nconstant field over one period is an exact loop:")
path = tm.integrate_evolution(constant, 0.0, 2 * np.pi, 4000)
dist, sign = tm.loop_distance(path.final)
print(f"  |u - {sign:+d} I|_inf = {dist:.3e}  ->  loop:",
      tm.detect_loop(path.final, tol=1e-8))

print("\nfour-wave reference field over [-2pi, 2pi]:")
path = tm.integrate_evolution(four_wave, *DEFAULT_INTERVAL, 4000)
stab = tm.classify_stability(path.final)
dist, sign = tm.loop_distance(path.final)
print(f"  max |det u - 1| = {np.max(np.abs(path.dets() - 1)):.3e}")
print(f"  gamma(2pi) = {stab.gamma:.6f}  ->  {stab.tag}")
print(f"  eigenvalues {stab.kappa[0]:.4f}, {stab.kappa[1]:.4f}")
print(f"  loop distance {dist:.4f}  ->  no loop; trajectories grow")

# --- trajectories ------------------------------------------------------------
grid = np.linspace(*DEFAULT_INTERVAL, 500)
traj_stable = tm.evolve_canonical(constant, (1.0, 1.0), grid)
traj_growing = tm.evolve_canonical(four_wave, (1.0, 1.0), grid)
print("\ntrajectory amplitude from q0 = (1, 1):")
print(f"  constant field: max|x| = {np.max(np.abs(traj_stable.x)):.3f}")
print(f"  four-wave     : max|x| = {np.max(np.abs(traj_growing.x)):.3f}")

from trapml.plot import series_plot

series_plot(OUT / "trajectories.svg", grid,
            [{"y": traj_stable.x, "label": "x, constant field"},
             {"y": traj_growing.x, "label": "x, four-wave field"}],
            title="canonical position under two trap fields", ylabel="x(t)")
path.write_csv(OUT / "four_wave_evolution.csv")
print(f"\nwrote {OUT / 'trajectories.svg'} and {OUT / 'four_wave_evolution.csv'}")
