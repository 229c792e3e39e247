import numpy as np
import pytest

import trapml as tm
from trapml.errors import DomainError
from trapml.presets import DEFAULT_INTERVAL, reference_field


def min_state():
    return tm.GaussianState.minimum_uncertainty((1.0, 1.0))


class TestGaussianState:
    def test_uncertainty_floor_enforced(self):
        with pytest.raises(DomainError):
            tm.GaussianState(mean=(0.0, 0.0), cov=np.diag([0.1, 0.1]))

    def test_non_positive_definite_rejected(self):
        with pytest.raises(DomainError):
            tm.GaussianState(mean=(0.0, 0.0),
                             cov=np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_asymmetric_rejected(self):
        with pytest.raises(DomainError):
            tm.GaussianState(mean=(0.0, 0.0),
                             cov=np.array([[1.0, 0.2], [0.1, 1.0]]))


class TestPropagation:
    def test_identity_is_neutral(self):
        s = min_state()
        out = tm.propagate_gaussian(s, np.eye(2))
        assert np.array_equal(out.mean, s.mean)
        assert np.array_equal(out.cov, s.cov)

    def test_det_cov_preserved_by_unit_determinant(self):
        s = min_state()
        rng = tm.PortableRng(3)
        for _ in range(25):
            a, b, c = rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)
            m = np.array([[np.exp(a), b], [0.0, np.exp(-a)]]) @ np.array(
                [[np.cos(c), np.sin(c)], [-np.sin(c), np.cos(c)]])
            out = tm.propagate_gaussian(s, m)
            assert out.det_cov == pytest.approx(0.25, abs=1e-10)

    def test_quarter_period_swaps_variances(self):
        start = tm.GaussianState(mean=(0.0, 0.0), cov=np.diag([2.0, 0.5]))
        path = tm.integrate_evolution(tm.constant_field(1.0), 0.0, np.pi / 2,
                                      2000)
        out = tm.propagate_gaussian(start, path.final)
        assert out.cov[0, 0] == pytest.approx(0.5, abs=1e-7)
        assert out.cov[1, 1] == pytest.approx(2.0, abs=1e-7)

    def test_composition(self):
        s = min_state()
        u1 = np.array([[1.0, 0.4], [0.0, 1.0]])
        u2 = np.array([[np.cos(0.3), np.sin(0.3)], [-np.sin(0.3), np.cos(0.3)]])
        a = tm.propagate_gaussian(tm.propagate_gaussian(s, u1), u2)
        b = tm.propagate_gaussian(s, u2 @ u1)
        assert np.allclose(a.mean, b.mean, atol=1e-15)
        assert np.allclose(a.cov, b.cov, atol=1e-15)

    def test_reference_field_invariants(self, reference_path):
        # det cov drift and density normalisation across the full evolution
        s = min_state()
        worst_drift = 0.0
        worst_norm = 0.0
        for k in range(0, len(reference_path), 100):
            out = tm.propagate_gaussian(s, reference_path[k])
            worst_drift = max(worst_drift, abs(out.det_cov - 0.25))
            sd = np.sqrt(out.sigma_xx)
            xs = np.linspace(out.mean[0] - 8 * sd, out.mean[0] + 8 * sd, 4001)
            total = np.trapezoid(tm.density(out, xs), xs)
            worst_norm = max(worst_norm, abs(total - 1.0))
        assert worst_drift <= 1e-10
        assert worst_norm <= 1e-6


class TestDensity:
    def test_peak_value(self):
        s = tm.GaussianState(mean=(0.7, 0.0), cov=np.diag([0.5, 0.5]))
        assert tm.density(s, 0.7) == pytest.approx(np.pi**-0.5, abs=1e-12)

    def test_normalisation(self):
        s = tm.GaussianState(mean=(1.0, -1.0), cov=np.diag([0.9, 0.4]))
        xs = np.linspace(1.0 - 8 * np.sqrt(0.9), 1.0 + 8 * np.sqrt(0.9), 4001)
        assert np.trapezoid(tm.density(s, xs), xs) == pytest.approx(1.0, abs=1e-6)

    def test_density_returns_to_start_after_a_loop(self):
        # constant unit field over a full period is an exact loop
        path = tm.integrate_evolution(tm.constant_field(1.0), 0.0, 2 * np.pi,
                                      4000)
        assert tm.detect_loop(path.final, tol=1e-8)
        s = min_state()
        out = tm.propagate_gaussian(s, path.final)
        xs = np.linspace(-4, 4, 201)
        assert np.max(np.abs(tm.density(out, xs) - tm.density(s, xs))) < 1e-8


class TestDensityDataset:
    def test_record_count_and_order(self):
        ds = tm.make_density_dataset(tm.constant_field(1.0), min_state(),
                                     np.linspace(-4, 4, 50),
                                     np.linspace(0, 3, 50), 0.0, seed=1)
        assert ds.n == 2500
        assert np.array_equal(np.unique(ds.t), np.linspace(0, 3, 50))
        # time-major: the first 50 records share t_grid[0]
        assert np.all(ds.t[:50] == ds.t[0])

    def test_noiseless_rows_match_analytic_density(self):
        t_grid = np.array([0.0, 0.5, 1.0])
        x_grid = np.linspace(-3, 3, 21)
        ds = tm.make_density_dataset(tm.constant_field(1.0), min_state(),
                                     x_grid, t_grid, 0.0, seed=2)
        path = tm.integrate_on_grid(tm.constant_field(1.0), t_grid)
        for i, t in enumerate(t_grid):
            state_t = tm.propagate_gaussian(min_state(), path[i])
            rows = slice(i * 21, (i + 1) * 21)
            assert np.allclose(ds.target[rows], tm.density(state_t, x_grid),
                               atol=1e-12)

    def test_deterministic_per_seed(self):
        mk = lambda s: tm.make_density_dataset(reference_field(), min_state(),
                                               np.linspace(-5, 5, 11),
                                               np.linspace(*DEFAULT_INTERVAL, 13),
                                               0.1, seed=s)
        a, b, c = mk(5), mk(5), mk(6)
        assert np.array_equal(a.target, b.target)
        assert not np.array_equal(a.target, c.target)


class TestDensityRegression:
    def test_recovers_single_coefficient(self):
        ds = tm.make_density_dataset(tm.constant_field(1.0), min_state(),
                                     np.linspace(-4, 4, 31),
                                     np.linspace(0, 3, 40), 0.0, seed=3)
        cfg = tm.OptimizerConfig(budget=100, init_points=10, patience=25,
                                 min_improvement=1e-10, seed=3)
        rep = tm.fit_density_regression(ds, cfg, 1, bounds=(0.25, 2.0))
        assert rep.best_params[0] == pytest.approx(1.0, abs=0.05)
        assert rep.train_metrics["r2"] > 0.99

    def test_zero_extra_budget(self):
        ds = tm.make_density_dataset(tm.constant_field(1.0), min_state(),
                                     np.linspace(-3, 3, 11),
                                     np.linspace(0, 2, 10), 0.0, seed=4)
        cfg = tm.OptimizerConfig(budget=8, init_points=8, seed=4)
        rep = tm.fit_density_regression(ds, cfg, 1)
        assert rep.iterations_run == 8
        assert rep.stop_reason == "budget"

    def test_requires_spatial_column(self):
        ds = tm.Dataset(t=np.linspace(0, 1, 5), target=np.ones(5),
                        provenance={"state0": min_state().to_json_dict()})
        with pytest.raises(DomainError):
            tm.fit_density_regression(ds, tm.OptimizerConfig(budget=5,
                                                             init_points=5), 1)
