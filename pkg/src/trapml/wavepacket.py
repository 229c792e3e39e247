"""Gaussian wave-packet propagation and spatio-temporal density regression.

Quadratic trap Hamiltonians map Gaussian states to Gaussian states: the
mean follows the canonical evolution matrix and the covariance transforms
by congruence.  The spatial probability density therefore only involves
the position row of the evolution, which is what the density regression
model exploits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datagen import Dataset, add_noise
from .dynamics.ansatz import OddHarmonicAnsatz, validate_ansatz
from .dynamics.evolution import EvolutionMatrix, integrate_on_grid
from .dynamics.fields import ElasticField
from .errors import DomainError
from .learning import FitReport, _history, _run_optimizer, DEFAULT_BOUNDS
from .metrics import r2, rmse
from .optimize import OptimizerConfig
from .rng import PortableRng

# dimensionless uncertainty floor for [x, p] = i
MIN_DET_COV = 0.25
_DET_TOL = 1e-9
_VAR_FLOOR = 1e-12


@dataclass(frozen=True)
class GaussianState:
    """First and second moments of a Gaussian packet in phase space."""

    mean: np.ndarray   # (<x>, <p>)
    cov: np.ndarray    # [[sigma_xx, sigma_xp], [sigma_xp, sigma_pp]]

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2)
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise DomainError("covariance must be symmetric")
        if np.linalg.eigvalsh(cov)[0] <= 0:
            raise DomainError("covariance must be positive definite")
        if np.linalg.det(cov) < MIN_DET_COV - _DET_TOL:
            raise DomainError("covariance violates the uncertainty bound "
                              "det cov >= 1/4")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def sigma_xx(self) -> float:
        return float(self.cov[0, 0])

    @property
    def det_cov(self) -> float:
        return float(np.linalg.det(self.cov))

    @staticmethod
    def minimum_uncertainty(mean=(1.0, 1.0)) -> "GaussianState":
        return GaussianState(mean=np.asarray(mean, dtype=float),
                             cov=np.array([[0.5, 0.0], [0.0, 0.5]]))

    def to_json_dict(self) -> dict:
        return {"mean": [float(v) for v in self.mean],
                "cov": [[float(v) for v in row] for row in self.cov]}


def propagate_gaussian(state: GaussianState, u) -> GaussianState:
    """Push the state through one evolution matrix (mean by u, cov by congruence)."""
    m = u.matrix if isinstance(u, EvolutionMatrix) else np.asarray(u, dtype=float)
    if not np.all(np.isfinite(m)):
        raise DomainError("evolution matrix must be finite")
    return GaussianState(mean=m @ state.mean, cov=m @ state.cov @ m.T)


def density(state: GaussianState, x):
    """Position-space probability density of the packet."""
    sxx = state.sigma_xx
    x = np.asarray(x, dtype=float)
    out = np.exp(-(x - state.mean[0]) ** 2 / (2.0 * sxx)) / math.sqrt(
        2.0 * math.pi * sxx)
    return float(out) if out.ndim == 0 else out


def _density_from_row(row1, row2, mean0, cov0, x):
    """Density via the position row (r1, r2) of an evolution matrix."""
    mean_x = row1 * mean0[0] + row2 * mean0[1]
    sxx = (row1**2 * cov0[0, 0] + 2.0 * row1 * row2 * cov0[0, 1]
           + row2**2 * cov0[1, 1])
    sxx = np.maximum(sxx, _VAR_FLOOR)
    return np.exp(-(x - mean_x) ** 2 / (2.0 * sxx)) / np.sqrt(2.0 * np.pi * sxx)


def make_density_dataset(field_: ElasticField, state0: GaussianState,
                         x_grid, t_grid, noise_fraction: float, seed: int,
                         target_steps: int = 4000) -> Dataset:
    """Spatio-temporal density records rho(x, t), evolved from t_grid[0].

    Rows are time-major: all x values of t_grid[0] first, and so on.
    Noise follows the datagen convention (sigma relative to the sample
    std of the clean densities).
    """
    x_grid = np.asarray(x_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    path = integrate_on_grid(field_, t_grid, target_steps=target_steps)
    row1 = path.mats[:, 0, 0]
    row2 = path.mats[:, 0, 1]
    tt = np.repeat(t_grid, len(x_grid))
    xx = np.tile(x_grid, len(t_grid))
    rho = _density_from_row(np.repeat(row1, len(x_grid)),
                            np.repeat(row2, len(x_grid)),
                            state0.mean, state0.cov, xx)
    noisy = add_noise(rho, noise_fraction, PortableRng(seed).derive("noise").seed)
    try:
        field_doc = field_.to_json_dict()
    except DomainError:
        field_doc = {"kind": "custom"}
    prov = {"kind": "density", "field": field_doc,
            "state0": state0.to_json_dict(),
            "interval": [float(t_grid[0]), float(t_grid[-1])],
            "x_range": [float(x_grid[0]), float(x_grid[-1])],
            "n_t": int(len(t_grid)), "n_x": int(len(x_grid)),
            "target_steps": int(target_steps)}
    return Dataset(t=tt, target=noisy, x_coord=xx,
                   noise_fraction=float(noise_fraction), seed=int(seed),
                   provenance=prov)


def fit_density_regression(ds: Dataset, config: OptimizerConfig,
                           n_params: int, bounds=DEFAULT_BOUNDS) -> FitReport:
    """Fit the ansatz so its closed-form position row reproduces rho(x, t).

    The model applies the det-1 closed form to the dataset's initial
    state; only the top row enters the density, so the model is total in
    the coefficients.  Cost is the mean squared density residual.
    """
    if n_params < 1:
        raise DomainError("n_params must be positive")
    if ds.x_coord is None:
        raise DomainError("density regression needs x_coord records")
    state_doc = ds.provenance.get("state0")
    if state_doc is None:
        raise DomainError("dataset provenance carries no initial state")
    state0 = GaussianState(mean=np.asarray(state_doc["mean"], dtype=float),
                           cov=np.asarray(state_doc["cov"], dtype=float))

    has_split = ds.split is not None
    tr = ds.indices("train") if has_split else np.arange(ds.n)
    t_tr, x_tr, y_tr = ds.t[tr], ds.x_coord[tr], ds.target[tr]
    ks = (2 * np.arange(1, n_params + 1) - 1).astype(float)
    cos_tr = np.cos(np.multiply.outer(t_tr, ks)) * ks
    sin_tr = np.sin(np.multiply.outer(t_tr, ks))

    def objective(a):
        row1 = cos_tr @ a
        row2 = sin_tr @ a
        rho = _density_from_row(row1, row2, state0.mean, state0.cov, x_tr)
        return float(np.mean((rho - y_tr) ** 2))

    trace = _run_optimizer(objective, n_params, config, bounds)
    ansatz = OddHarmonicAnsatz(tuple(trace.best_params))

    def split_metrics(idx):
        row1 = ansatz.d1(ds.t[idx])
        row2 = ansatz.value(ds.t[idx])
        pred = _density_from_row(row1, row2, state0.mean, state0.cov,
                                 ds.x_coord[idx])
        return {"rmse": rmse(ds.target[idx], pred),
                "r2": r2(ds.target[idx], pred)}

    grid = np.unique(ds.t)
    return FitReport(
        task="density",
        best_params=tuple(trace.best_params),
        history=_history(trace),
        train_metrics=split_metrics(tr),
        test_metrics=(split_metrics(ds.indices("test")) if has_split
                      else split_metrics(np.arange(ds.n))),
        seed=config.seed,
        iterations_run=len(trace.evaluations),
        stop_reason=trace.stop_reason,
        q0=(float(state0.mean[0]), float(state0.mean[1])),
        theta_validity=validate_ansatz(ansatz, grid),
        surrogate_fallbacks=getattr(trace, "surrogate_fallbacks", ()))
