"""Acceptance suite: one test per criterion, each at its stated tolerance.

Criteria 3, 5, 6 and 7 encode focusing/loop behaviour and learning-quality
reproduction targets for the bundled four-harmonic reference configuration.
The measured dynamics of that configuration is strongly defocusing
(gamma(2 pi) ~ 19.21, no evolution loop), and the odd-harmonic position
model cannot represent its trajectories (best attainable R^2 ~ 0 even for
an exact least-squares solve), so those four assertions fail; the prints
below and README's "Known failing acceptance checks" section carry the
measured values.  All other criteria pass.
"""
import time

import numpy as np
import pytest

import trapml as tm
from trapml.presets import (DEFAULT_INTERVAL, DEFAULT_N_PARAMS, DEFAULT_Q0,
                            reference_field)
from trapml.rng import PortableRng

SEEDS = (0, 1, 2, 3, 4)
BUDGET = 150


def announce(num, name, ok, detail):
    print(f"ACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")


def pipeline_dataset(noise, seed, labels=None):
    ds, traj = tm.make_trajectory_dataset(reference_field(), DEFAULT_Q0,
                                          DEFAULT_INTERVAL, 500, noise, seed,
                                          labels=labels)
    ds = tm.split_dataset(ds, 0.8, PortableRng(seed).derive("split").seed)
    return ds, traj


@pytest.fixture(scope="module")
def regression_runs():
    runs = []
    start = time.monotonic()
    for seed in SEEDS:
        ds, traj = pipeline_dataset(0.10, seed)
        cfg = tm.OptimizerConfig(budget=BUDGET, init_points=10, patience=15,
                                 seed=seed)
        runs.append((tm.fit_regression(ds, cfg, DEFAULT_N_PARAMS), ds, traj))
    return runs, time.monotonic() - start


def test_criterion_01_constant_field_identity():
    start = time.monotonic()
    grid = np.linspace(*DEFAULT_INTERVAL, 1000)
    worst = max(tm.ansatz_field_residual(tm.ConstantFieldAnsatz(w),
                                         tm.constant_field(w * w), grid)
                for w in (0.5, 1.0, 2.0))
    elapsed = time.monotonic() - start
    ok = worst <= 1e-10 and elapsed < 1.0
    announce(1, "constant-field-identity", ok,
             f"max residual {worst:.3e}, {elapsed:.2f}s")
    assert worst <= 1e-10
    assert elapsed < 1.0


def test_criterion_02_symplecticity():
    start = time.monotonic()
    path = tm.integrate_evolution(reference_field(), *DEFAULT_INTERVAL, 4000)
    dev = float(np.max(np.abs(path.dets() - 1.0)))
    elapsed = time.monotonic() - start
    ok = dev <= 1e-8 and elapsed < 1.0
    announce(2, "symplecticity", ok, f"max |det-1| {dev:.3e}, {elapsed:.2f}s")
    assert dev <= 1e-8
    assert elapsed < 1.0


def test_criterion_03_stability_focusing():
    path = tm.integrate_evolution(reference_field(), *DEFAULT_INTERVAL, 4000)
    stab = tm.classify_stability(path.final)
    ok = abs(stab.gamma) < 2 and stab.tag == "focusing"
    announce(3, "stability-focusing", ok,
             f"measured gamma {stab.gamma:.7f}, tag {stab.tag}")
    assert abs(stab.gamma) < 2, (
        "reference field is measured defocusing: gamma(2pi) = "
        f"{stab.gamma:.7f}; the focusing expectation does not hold")
    assert stab.tag == "focusing"


def test_criterion_04_loop_distance_convergence():
    d = {}
    for steps in (4000, 8000):
        path = tm.integrate_evolution(reference_field(), *DEFAULT_INTERVAL,
                                      steps)
        d[steps], sign = tm.loop_distance(path.final)
    drift = abs(d[4000] - d[8000])
    ok = drift <= 1e-6
    announce(4, "loop-distance-convergence", ok,
             f"archived distance {d[4000]:.9f} (sign {sign:+d}), "
             f"step-count drift {drift:.3e}, loop verdict "
             f"{tm.detect_loop(path.final, tol=1e-3)}")
    assert drift <= 1e-6


def test_criterion_05_regression_reproduction(regression_runs):
    runs, elapsed = regression_runs
    rmses, r2s, floors = [], [], []
    for report, ds, traj in runs:
        rmses.append(report.test_metrics["rmse"])
        r2s.append(report.test_metrics["r2"])
        floors.append(0.10 * float(np.std(traj.x, ddof=1)))
    med_rmse = float(np.median(rmses))
    med_r2 = float(np.median(r2s))
    floor = float(np.median(floors))
    good_seeds = sum(r >= 0.9 for r in r2s)
    ok = (med_rmse <= 1.5 * floor and med_r2 >= 0.95 and good_seeds >= 4
          and elapsed < 120.0)
    announce(5, "regression-reproduction", ok,
             f"median test RMSE {med_rmse:.4f} vs floor {floor:.4f}, "
             f"median test R2 {med_r2:.4f}, seeds with R2>=0.9: "
             f"{good_seeds}/5, {elapsed:.1f}s")
    assert elapsed < 120.0
    assert med_rmse <= 1.5 * floor, (
        "reference-field trajectories are not representable by the "
        f"odd-harmonic model: median test RMSE {med_rmse:.4f} vs noise "
        f"floor {floor:.4f}")
    assert med_r2 >= 0.95
    assert good_seeds >= 4


def test_criterion_06_classification_reproduction():
    start = time.monotonic()
    aucs = []
    for seed in SEEDS:
        ds, _ = pipeline_dataset(0.30, seed, labels=2)
        cfg = tm.OptimizerConfig(budget=BUDGET, init_points=10, patience=15,
                                 seed=seed)
        report = tm.fit_classifier(ds, cfg, DEFAULT_N_PARAMS, threshold=0.5)
        aucs.append(report.test_metrics["auc"])
    elapsed = time.monotonic() - start
    med_auc = float(np.median(aucs))
    ok = med_auc >= 0.95 and min(aucs) >= 0.9 and elapsed < 120.0
    announce(6, "classification-reproduction", ok,
             f"median test AUC {med_auc:.4f}, min {min(aucs):.4f}, "
             f"{elapsed:.1f}s")
    assert elapsed < 120.0
    assert med_auc >= 0.95, (
        "sigmoid-of-position model cannot rank the defocusing "
        f"reference trajectories: median test AUC {med_auc:.4f}")
    assert min(aucs) >= 0.9


def test_criterion_07_conjugate_prediction(regression_runs):
    runs, _ = regression_runs
    deriv_r2, matrix_log = [], []
    for report, ds, traj in runs:
        model = report.regression_model()
        deriv_r2.append(tm.r2(traj.p, model.predict_momentum(traj.grid,
                                                             mode="derivative")))
        keep = np.abs(model.ansatz.value(traj.grid)) > 1e-3
        entry = {}
        for mode in ("matrix_det1", "matrix_halved"):
            pred = model.predict_momentum(traj.grid[keep], mode=mode)
            entry[mode] = tm.r2(traj.p[keep], pred)
        matrix_log.append(entry)
    med = float(np.median(deriv_r2))
    ok = med >= 0.8
    announce(7, "conjugate-prediction", ok,
             f"median derivative-mode momentum R2 {med:.4f}; matrix-mode "
             f"diagnostics (archived, no threshold): {matrix_log}")
    assert med >= 0.8, (
        f"momentum prediction fails with the position fit: median R2 {med:.4f}")


def test_criterion_08_optimizer_sanity():
    space = tm.ParameterSpace(np.full(3, -2.0), np.full(3, 2.0))
    hits = 0
    bo_best, rs_best = [], []
    for seed in range(10):
        rng = PortableRng(999 + seed)
        target = np.array([rng.uniform(-1.5, 1.5) for _ in range(3)])
        objective = lambda a, c=target: float(np.sum((a - c) ** 2))
        cfg = tm.OptimizerConfig(budget=60, init_points=10, patience=10**6,
                                 seed=seed)
        bo = tm.bayes_minimize(objective, space, cfg)
        rs = tm.random_search(objective, space, cfg)
        bo_best.append(bo.best_cost)
        rs_best.append(rs.best_cost)
        hits += bo.best_cost <= 0.01
    beats = float(np.median(bo_best)) < float(np.median(rs_best))
    ok = hits >= 9 and beats
    announce(8, "optimizer-sanity", ok,
             f"cost<=0.01 in {hits}/10 seeds; median BO "
             f"{np.median(bo_best):.5f} vs random {np.median(rs_best):.4f}")
    assert hits >= 9
    assert beats


def test_criterion_09_property_suites(tmp_path, unit_field_dataset):
    # compact re-assertions of the named property suites; the full
    # randomised versions live in test_properties.py
    field = reference_field()
    full = tm.integrate_evolution(field, -2.0, 2.0, 2000)
    left = tm.integrate_evolution(field, -2.0, 0.3, 1000)
    right = tm.integrate_evolution(field, 0.3, 2.0, 1000)
    comp_err = np.max(np.abs(full.final.matrix
                             - right.final.matrix @ left.final.matrix))

    tau_path = tm.integrate_evolution(field, -np.pi, np.pi, 3000)
    parity_err = abs(tau_path.final.u11 - tau_path.final.u22)

    ei_err = abs(tm.expected_improvement(0.0, 1.0, 0.0) - 0.3989422804014327)

    rng = PortableRng(7)
    y = (rng.random(120) < 0.5).astype(int)
    s = rng.normal(120)
    _, auc1 = tm.roc_and_auc(y, s)
    _, auc2 = tm.roc_and_auc(y, np.exp(s))
    auc_err = abs(auc1 - auc2)

    ds, _ = unit_field_dataset
    path = tmp_path / "roundtrip.csv"
    ds.write_csv(path)
    back = tm.Dataset.read_csv(path)
    round_trip = (np.array_equal(ds.t, back.t)
                  and np.array_equal(ds.target, back.target)
                  and np.array_equal(ds.split, back.split))

    cfg = tm.OptimizerConfig(budget=20, init_points=8, seed=5)
    det = (tm.fit_regression(ds, cfg, 2).best_params
           == tm.fit_regression(ds, cfg, 2).best_params)

    ok = (comp_err < 1e-7 and parity_err < 1e-6 and ei_err < 1e-12
          and auc_err < 1e-14 and round_trip and det)
    announce(9, "property-suites", ok,
             f"composition {comp_err:.2e}, parity {parity_err:.2e}, "
             f"EI {ei_err:.2e}, AUC invariance {auc_err:.2e}, "
             f"round-trip {round_trip}, fit determinism {det}")
    assert comp_err < 1e-7
    assert parity_err < 1e-6
    assert ei_err < 1e-12
    assert auc_err < 1e-14
    assert round_trip
    assert det


def test_criterion_10_wavepacket_invariants():
    state0 = tm.GaussianState.minimum_uncertainty(DEFAULT_Q0)
    path = tm.integrate_evolution(reference_field(), *DEFAULT_INTERVAL, 4000)
    drift, norm_err = 0.0, 0.0
    for k in range(0, len(path), 100):
        out = tm.propagate_gaussian(state0, path[k])
        drift = max(drift, abs(out.det_cov - 0.25))
        sd = np.sqrt(out.sigma_xx)
        xs = np.linspace(out.mean[0] - 8 * sd, out.mean[0] + 8 * sd, 4001)
        norm_err = max(norm_err, abs(float(np.trapezoid(tm.density(out, xs),
                                                        xs)) - 1.0))

    ds = tm.make_density_dataset(tm.constant_field(1.0), state0,
                                 np.linspace(-4, 4, 31),
                                 np.linspace(0, 3, 40), 0.0, seed=3)
    cfg = tm.OptimizerConfig(budget=100, init_points=10, patience=25,
                             min_improvement=1e-10, seed=3)
    rep = tm.fit_density_regression(ds, cfg, 1, bounds=(0.25, 2.0))
    rel_err = abs(rep.best_params[0] - 1.0)

    ok = drift <= 1e-10 and norm_err <= 1e-6 and rel_err <= 0.05
    announce(10, "wavepacket-invariants", ok,
             f"det-cov drift {drift:.2e}, normalisation error {norm_err:.2e}, "
             f"coefficient recovery error {rel_err:.4f}")
    assert drift <= 1e-10
    assert norm_err <= 1e-6
    assert rel_err <= 0.05
