"""Randomised property suites (all seeded through the portable stream)."""
import numpy as np
import pytest

import trapml as tm
from trapml.presets import DEFAULT_INTERVAL
from trapml.rng import PortableRng


def random_harmonic_field(rng, n_terms=4):
    terms = [(rng.uniform(0.2, 1.2), 0.0)]
    for _ in range(n_terms - 1):
        terms.append((rng.uniform(-0.5, 0.5), rng.uniform(0.1, 4.0)))
    return tm.harmonic_field(terms)


def random_symplectic(rng):
    a = rng.uniform(-0.8, 0.8)
    b = rng.uniform(-1.0, 1.0)
    c = rng.uniform(0.0, 2 * np.pi)
    shear = np.array([[1.0, b], [0.0, 1.0]])
    squeeze = np.array([[np.exp(a), 0.0], [0.0, np.exp(-a)]])
    rot = np.array([[np.cos(c), np.sin(c)], [-np.sin(c), np.cos(c)]])
    return shear @ squeeze @ rot


def test_symplectic_composition_over_random_fields():
    rng = PortableRng(101)
    for trial in range(8):
        field = random_harmonic_field(rng)
        t0 = rng.uniform(-3.0, -1.0)
        t2 = rng.uniform(1.0, 3.0)
        t1 = rng.uniform(-0.5, 0.5)
        n = 1600
        full = tm.integrate_evolution(field, t0, t2, n)
        left = tm.integrate_evolution(field, t0, t1, n // 2)
        right = tm.integrate_evolution(field, t1, t2, n // 2)
        err = np.max(np.abs(full.final.matrix
                            - right.final.matrix @ left.final.matrix))
        assert err < 1e-7, f"trial {trial}: composition error {err}"


def test_symplecticity_over_random_fields():
    rng = PortableRng(103)
    for _ in range(6):
        field = random_harmonic_field(rng)
        span = rng.uniform(2.0, 4.0) * np.pi
        path = tm.integrate_evolution(field, -span / 2, span / 2, 4000)
        assert np.max(np.abs(path.dets() - 1.0)) <= 1e-8


def test_even_field_diagonal_parity():
    rng = PortableRng(107)
    for _ in range(8):
        field = random_harmonic_field(rng)
        tau = rng.uniform(1.0, 2 * np.pi)
        path = tm.integrate_evolution(field, -tau, tau, 3000)
        u = path.final
        assert abs(u.u11 - u.u22) < 1e-6


def test_stability_matches_direct_eigendecomposition():
    rng = PortableRng(109)
    for _ in range(100):
        m = random_symplectic(rng)
        s = tm.classify_stability(m, tol=1e-12)
        eigs = np.linalg.eigvals(m)
        got = sorted(s.kappa, key=lambda z: (z.real, z.imag))
        ref = sorted(eigs, key=lambda z: (z.real, z.imag))
        for g, r in zip(got, ref):
            assert abs(g - r) < 1e-9
        if s.tag == "focusing":
            assert np.all(np.abs(np.imag(eigs)) > 0)
            assert abs(abs(eigs[0]) - 1.0) < 1e-9
        elif s.tag == "defocusing":
            assert np.all(np.abs(np.imag(eigs)) < 1e-12)


def test_expected_improvement_closed_form_values():
    from scipy.stats import norm
    rng = PortableRng(113)
    for _ in range(200):
        mu = rng.uniform(-2, 2)
        sigma = rng.uniform(0.0, 2.0)
        best = rng.uniform(-2, 2)
        got = tm.expected_improvement(mu, sigma, best)
        if sigma == 0:
            expect = max(best - mu, 0.0)
        else:
            z = (best - mu) / sigma
            expect = (best - mu) * norm.cdf(z) + sigma * norm.pdf(z)
        assert got == pytest.approx(expect, abs=1e-14)
        assert got >= 0.0


def test_auc_invariant_under_increasing_transforms():
    rng = PortableRng(127)
    for _ in range(10):
        n = 150
        y = (rng.random(n) < 0.5).astype(int)
        if y.min() == y.max():
            continue
        s = rng.normal(n)
        _, base = tm.roc_and_auc(y, s)
        for transform in (lambda v: 3.0 * v + 11.0,
                          np.tanh,
                          lambda v: np.exp(v / 2.0)):
            _, auc = tm.roc_and_auc(y, transform(s))
            assert auc == pytest.approx(base, abs=1e-14)


def test_dataset_round_trip_bit_exactness(tmp_path):
    rng = PortableRng(131)
    for trial in range(5):
        n = 40 + int(rng.below(60))
        ds = tm.Dataset(
            t=np.sort(rng.uniform(-7, 7, n)),
            target=rng.normal(n, sd=3.0),
            x_coord=rng.uniform(-5, 5, n) if trial % 2 else None,
            label=(np.array([rng.below(3) for _ in range(n)], dtype=np.int64)
                   if trial % 3 == 0 else None),
        )
        if trial % 2 == 0:
            ds = tm.split_dataset(ds, 0.75, seed=trial, strategy="shuffled")
        path = tmp_path / f"ds{trial}.csv"
        ds.write_csv(path)
        back = tm.Dataset.read_csv(path)
        assert np.array_equal(ds.t, back.t)
        assert np.array_equal(ds.target, back.target)
        for name in ("x_coord", "label", "split"):
            a, b = getattr(ds, name), getattr(back, name)
            assert (a is None) == (b is None)
            if a is not None:
                assert np.array_equal(a, b)


def test_every_fit_is_seed_deterministic(unit_field_dataset):
    ds, _ = unit_field_dataset
    cfg = tm.OptimizerConfig(budget=25, init_points=8, seed=42)

    r1 = tm.fit_regression(ds, cfg, 2)
    r2 = tm.fit_regression(ds, cfg, 2)
    assert r1.best_params == r2.best_params
    assert r1.history == r2.history

    cds, _ = tm.make_trajectory_dataset(tm.constant_field(1.0), (1.0, 1.0),
                                        DEFAULT_INTERVAL, 200, 0.3, seed=3,
                                        labels=2)
    cds = tm.split_dataset(cds, 0.8, seed=3)
    c1 = tm.fit_classifier(cds, cfg, 2)
    c2 = tm.fit_classifier(cds, cfg, 2)
    assert c1.best_params == c2.best_params
    assert c1.history == c2.history

    dds = tm.make_density_dataset(tm.constant_field(1.0),
                                  tm.GaussianState.minimum_uncertainty(),
                                  np.linspace(-3, 3, 15),
                                  np.linspace(0, 2, 12), 0.05, seed=4)
    d1 = tm.fit_density_regression(dds, cfg, 1)
    d2 = tm.fit_density_regression(dds, cfg, 1)
    assert d1.best_params == d2.best_params
    assert d1.history == d2.history


def test_constant_field_generator_recovers_stiffness_everywhere():
    rng = PortableRng(137)
    for _ in range(15):
        w = rng.uniform(0.3, 2.5)
        a = tm.ConstantFieldAnsatz(w)
        ts = rng.uniform(-5, 5, 50)
        keep = np.abs(a.value(ts)) > 1e-3
        beta = tm.stiffness_from_ansatz(a, ts[keep])
        assert np.max(np.abs(beta - w * w)) <= 1e-8
