"""Gaussian packet propagation and spatio-temporal density regression.

Quadratic traps keep Gaussians Gaussian: the mean follows the evolution
matrix and the covariance transforms by congruence, conserving det(cov).
A density dataset over (x, t) is then fit by the same ansatz machinery.
"""
import pathlib

import numpy as np

import trapml as tm
from trapml.presets import DEFAULT_INTERVAL, reference_field

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

state0 = tm.GaussianState.minimum_uncertainty((1.0, 1.0))
print(f"initial packet: mean {state0.mean}, det cov = {state0.det_cov}")

# --- invariants under the four-wave reference field ---------------------------
path = tm.integrate_evolution(reference_field(), *DEFAULT_INTERVAL, 4000)
drift = 0.0
widths = []
for k in range(0, len(path), 50):
    out = tm.propagate_gaussian(state0, path[k])
    drift = max(drift, abs(out.det_cov - 0.25))
    widths.append(np.sqrt(out.sigma_xx))
print(f"det-cov drift across the evolution: {drift:.3e}")
print(f"packet width range: [{min(widths):.4f}, {max(widths):.4f}] "
      "(defocusing field stretches the packet)")

# --- density rows --------------------------------------------------------------
xs = np.linspace(-6, 6, 301)
mid = tm.propagate_gaussian(state0, path[len(path) // 2])
print(f"density at the packet centre, mid-evolution: "
      f"{tm.density(mid, float(mid.mean[0])):.4f}")

# --- spatio-temporal regression on the identifiable constant field -------------
ds = tm.make_density_dataset(tm.constant_field(1.0), state0,
                             np.linspace(-4, 4, 31), np.linspace(0, 3, 40),
                             noise_fraction=0.0, seed=3)
print(f"\ndensity dataset: {ds.n} records on a 40 x 31 grid")
cfg = tm.OptimizerConfig(budget=100, init_points=10, patience=25,
                         min_improvement=1e-10, seed=3)
report = tm.fit_density_regression(ds, cfg, n_params=1, bounds=(0.25, 2.0))
print(f"recovered leading coefficient: {report.best_params[0]:.4f} (true 1.0)")
print(f"fit R2: {report.train_metrics['r2']:.6f}")

from trapml.plot import series_plot

t_show = np.unique(ds.t)[::8]
series = []
for t in t_show:
    rows = ds.t == t
    series.append({"y": ds.target[rows], "label": f"t = {t:.2f}"})
series_plot(OUT / "density_slices.svg", np.linspace(-4, 4, 31), series,
            title="packet density slices", xlabel="x", ylabel="rho(x, t)")
print(f"\nwrote {OUT / 'density_slices.svg'}")
