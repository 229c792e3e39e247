"""Command-line front end wiring datasets, fits and predictions.

Every command is deterministic given its config document (seeds
included); re-running a command overwrites byte-identical outputs.
Exit codes: 0 success, 2 usage/config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import RunConfig
from .datagen import Dataset, make_trajectory_dataset, split_dataset
from .dynamics.ansatz import (OddHarmonicAnsatz, stiffness_from_ansatz,
                              validate_ansatz)
from .dynamics.evolution import classify_stability, integrate_evolution, loop_distance
from .errors import ConfigError, DomainError, IntegrationError, SingularAnsatzError
from .learning import FitReport, fit_classifier, fit_regression, write_predictions_csv
from .metrics import write_roc_csv
from .plot import roc_plot, series_plot
from .rng import PortableRng
from .wavepacket import GaussianState, fit_density_regression, make_density_dataset

USAGE_ERROR = 2
NUMERICAL_ERROR = 3


def _sidecar(csv_path: Path) -> Path:
    return csv_path.with_name(csv_path.stem + ".provenance.json")


def _load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    return cfg.with_overrides(seed=args.seed, output_format=args.format)


def _outdir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _derived_seed(seed: int, tag: str) -> int:
    return PortableRng(seed).derive(tag).seed


def _build_dataset(cfg: RunConfig) -> Dataset:
    if cfg.dataset_kind == "density":
        x_grid = np.linspace(cfg.x_range[0], cfg.x_range[1], cfg.n_x)
        t_grid = np.linspace(cfg.interval[0], cfg.interval[1], cfg.n_points)
        state0 = GaussianState.minimum_uncertainty(mean=cfg.q0)
        ds = make_density_dataset(cfg.field_spec, state0, x_grid, t_grid,
                                  cfg.noise_fraction, cfg.seed,
                                  target_steps=cfg.target_steps)
    else:
        ds, _ = make_trajectory_dataset(cfg.field_spec, cfg.q0, cfg.interval,
                                        cfg.n_points, cfg.noise_fraction,
                                        cfg.seed, labels=cfg.n_classes,
                                        target_steps=cfg.target_steps)
    return split_dataset(ds, cfg.split_ratio,
                         _derived_seed(cfg.seed, "split"),
                         strategy=cfg.split_strategy)


def cmd_gen_data(args) -> int:
    cfg = _load_config(args)
    out = _outdir(args)
    ds = _build_dataset(cfg)
    ds.write_csv(out / "dataset.csv")
    ds.write_provenance(_sidecar(out / "dataset.csv"))
    cfg.write_json(out / "resolved_config.json")
    print(f"wrote {ds.n} records to {out / 'dataset.csv'}")
    return 0


def cmd_evolve(args) -> int:
    cfg = _load_config(args)
    out = _outdir(args)
    path = integrate_evolution(cfg.field_spec, cfg.interval[0],
                               cfg.interval[1], steps=cfg.target_steps)
    path.write_csv(out / "evolution.csv")
    grid = np.linspace(cfg.interval[0], cfg.interval[1], cfg.n_points)
    from .datagen import evolve_canonical
    traj = evolve_canonical(cfg.field_spec, cfg.q0, grid,
                            target_steps=cfg.target_steps)
    with open(out / "trajectory.csv", "w", encoding="utf-8") as fh:
        fh.write("t,x,p\n")
        for i in range(len(grid)):
            fh.write(f"{grid[i]:.17g},{traj.x[i]:.17g},{traj.p[i]:.17g}\n")
    stab = classify_stability(path.final)
    dist, sign = loop_distance(path.final)
    doc = {"schema": 1, "gamma": stab.gamma, "stability": stab.tag,
           "kappa": [[k.real, k.imag] for k in stab.kappa],
           "loop_distance": dist, "loop_sign": sign,
           "max_det_deviation": float(np.max(np.abs(path.dets() - 1.0)))}
    with open(out / "stability.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    cfg.write_json(out / "resolved_config.json")
    if cfg.output_format == "svg":
        series_plot(out / "trajectory.svg", grid,
                    [{"y": traj.x, "label": "x"}, {"y": traj.p, "label": "p"}],
                    title="canonical evolution", ylabel="value")
    print(f"stability {stab.tag} (gamma={stab.gamma:.6g}), "
          f"loop distance {dist:.6g} (sign {sign:+d})")
    return 0


def _fit_predictions(task: str, report: FitReport, ds: Dataset, out: Path,
                     fmt: str) -> None:
    if task == "regression":
        model = report.regression_model()
        pred = model.predict_position(ds.t)
        write_predictions_csv(out / "predictions.csv", ds.t,
                              y_true=ds.target, y_pred=pred)
        if fmt == "svg":
            series_plot(out / "fit.svg", ds.t,
                        [{"y": ds.target, "label": "target", "kind": "scatter"},
                         {"y": pred, "label": "model"}],
                        title="regression fit", ylabel="x")
    elif task == "classification":
        model = report.classifier_model()
        xi = model.decision_value(ds.t)
        prob = model.probability(ds.t)
        pred_label = model.predict_label(ds.t)
        write_predictions_csv(out / "predictions.csv", ds.t,
                              y_true=ds.label, y_pred=xi, prob=prob,
                              label_pred=pred_label)
        write_roc_csv(out / "roc.csv", report.roc)
        if fmt == "svg":
            roc_plot(out / "roc.svg", report.roc,
                     report.test_metrics["auc"], title="test ROC")
            series_plot(out / "fit.svg", ds.t,
                        [{"y": ds.label, "label": "class", "kind": "scatter"},
                         {"y": prob, "label": "probability"}],
                        title="classification fit", ylabel="class / probability")
    else:  # density
        ansatz = report.ansatz
        from .wavepacket import _density_from_row
        state_doc = ds.provenance["state0"]
        state0 = GaussianState(mean=np.asarray(state_doc["mean"]),
                               cov=np.asarray(state_doc["cov"]))
        pred = _density_from_row(ansatz.d1(ds.t), ansatz.value(ds.t),
                                 state0.mean, state0.cov, ds.x_coord)
        with open(out / "predictions.csv", "w", encoding="utf-8") as fh:
            fh.write("t,x_coord,y_true,y_pred\n")
            for i in range(ds.n):
                fh.write(f"{ds.t[i]:.17g},{ds.x_coord[i]:.17g},"
                         f"{ds.target[i]:.17g},{pred[i]:.17g}\n")


def cmd_fit(args) -> int:
    cfg = _load_config(args)
    out = _outdir(args)
    data_path = Path(args.data)
    if not data_path.exists():
        raise ConfigError(f"dataset file not found: {data_path}")
    prov = {}
    sidecar = _sidecar(data_path)
    if sidecar.exists():
        with open(sidecar, "r", encoding="utf-8") as fh:
            prov = json.load(fh)
    ds = Dataset.read_csv(data_path,
                          noise_fraction=prov.get("noise_fraction", 0.0),
                          seed=prov.get("seed", 0), provenance=prov)
    if ds.split is None:
        ds = split_dataset(ds, cfg.split_ratio,
                           _derived_seed(cfg.seed, "split"),
                           strategy=cfg.split_strategy)
    opt = replace(cfg.optimizer, seed=_derived_seed(cfg.seed, "optimizer"))
    if args.task == "regression":
        report = fit_regression(ds, opt, cfg.n_params)
    elif args.task == "classification":
        report = fit_classifier(ds, opt, cfg.n_params, threshold=cfg.threshold)
    else:
        report = fit_density_regression(ds, opt, cfg.n_params)
    report.write_json(out / "fit_report.json")
    _fit_predictions(args.task, report, ds, out, cfg.output_format)
    cfg.write_json(out / "resolved_config.json")
    print(f"{args.task} fit: {report.iterations_run} evaluations "
          f"({report.stop_reason}); test metrics {report.test_metrics}")
    return 0


def cmd_predict(args) -> int:
    model_path = Path(args.model)
    times_path = Path(args.times)
    for p in (model_path, times_path):
        if not p.exists():
            raise ConfigError(f"input file not found: {p}")
    report = FitReport.read_json(model_path)
    out = _outdir(args)
    with open(times_path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if "t" not in header:
        raise ConfigError("times file needs a t column")
    cols = {name: i for i, name in enumerate(header)}
    t = np.array([float(r[cols["t"]]) for r in rows])
    if report.task == "classification":
        model = report.classifier_model()
        xi = model.decision_value(t)
        write_predictions_csv(out / "predictions.csv", t, y_pred=xi,
                              prob=model.probability(t),
                              label_pred=model.predict_label(t))
    elif report.task == "regression":
        mode = args.momentum_mode or report.momentum_mode
        model = report.regression_model(momentum_mode=mode)
        write_predictions_csv(out / "predictions.csv", t,
                              y_pred=model.predict_position(t),
                              p_pred=model.predict_momentum(t))
    else:
        if "x_coord" not in cols:
            raise ConfigError("density prediction needs an x_coord column")
        raise ConfigError("density prediction requires the originating "
                          "dataset; use fit outputs instead")
    print(f"wrote predictions for {len(t)} times to {out / 'predictions.csv'}")
    return 0


def cmd_theta_inspect(args) -> int:
    cfg = _load_config(args)
    out = _outdir(args)
    coeffs = cfg.theta_coeffs
    if args.theta:
        try:
            coeffs = tuple(float(v) for v in json.loads(args.theta))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"malformed --theta: {exc}") from exc
    if not coeffs:
        raise ConfigError("no ansatz coefficients given "
                          "(config theta.coeffs or --theta)")
    ansatz = OddHarmonicAnsatz(coeffs)
    grid = np.linspace(cfg.interval[0], cfg.interval[1], cfg.n_points)
    report = validate_ansatz(ansatz, grid)
    with open(out / "theta_validity.json", "w", encoding="utf-8") as fh:
        doc = {"schema": 1, "coeffs": list(coeffs)}
        doc.update(report.to_json_dict())
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    beta = stiffness_from_ansatz(ansatz, grid, on_singular="nan")
    with open(out / "stiffness.csv", "w", encoding="utf-8") as fh:
        fh.write("t,beta\n")
        for i in range(len(grid)):
            fh.write(f"{grid[i]:.17g},{beta[i]:.17g}\n")
    print(f"admissible: {report.admissible} "
          f"({len(report.zero_crossings)} zero crossings, "
          f"{len(report.steady_points)} steady points)")
    return 0


def cmd_loop_check(args) -> int:
    cfg = _load_config(args)
    out = _outdir(args)
    path = integrate_evolution(cfg.field_spec, cfg.interval[0],
                               cfg.interval[1], steps=cfg.target_steps)
    dist, sign = loop_distance(path.final)
    is_loop = dist <= args.tol
    doc = {"schema": 1, "loop": bool(is_loop), "distance": dist,
           "sign": sign, "tol": args.tol,
           "gamma": float(path.final.trace)}
    with open(out / "loop.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"loop: {is_loop} (distance {dist:.6g} from {sign:+d} identity, "
          f"tol {args.tol:g})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trapml",
        description="simulate ion-trap canonical dynamics and train "
                    "regression/classification models on them")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="run config JSON")
        p.add_argument("--seed", type=int, help="override the run seed")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument("--format", choices=["csv", "json", "svg"],
                       help="output format (svg adds plots)")

    p = sub.add_parser("gen-data", help="write a synthetic dataset")
    common(p)
    p.set_defaults(fn=cmd_gen_data)

    p = sub.add_parser("evolve", help="integrate the evolution matrix")
    common(p)
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("fit", help="train a model on a dataset")
    common(p)
    p.add_argument("--task", required=True,
                   choices=["regression", "classification", "density"])
    p.add_argument("--data", required=True, help="dataset CSV path")
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("predict", help="predict from a stored fit report")
    common(p)
    p.add_argument("--model", required=True, help="fit report JSON")
    p.add_argument("--times", required=True, help="CSV with a t column")
    p.add_argument("--momentum-mode",
                   choices=["derivative", "matrix_det1", "matrix_halved"],
                   help="override the stored momentum mode")
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("theta-inspect",
                       help="admissibility report and induced stiffness")
    common(p)
    p.add_argument("--theta", help='coefficients as JSON, e.g. "[1.0, 0.1]"')
    p.set_defaults(fn=cmd_theta_inspect)

    p = sub.add_parser("loop-check", help="evolution-loop verdict for a field")
    common(p)
    p.add_argument("--tol", type=float, default=1e-6,
                   help="loop distance tolerance")
    p.set_defaults(fn=cmd_loop_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except DomainError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (IntegrationError, SingularAnsatzError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
