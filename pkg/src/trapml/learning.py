"""Regression and classification models over canonical variables.

Both model families share the same trainable object: the odd-harmonic
ansatz whose closed-form evolution top row maps an initial canonical pair
to a position trace x(t) = x0 * theta'(t) + p0 * theta(t).  Regression
scores that trace directly; classification pushes it through a logistic
sigmoid.  Fitting scans the coefficient box with the derivative-free
optimisers in :mod:`trapml.optimize`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace as dc_replace

import numpy as np
from scipy.special import expit

from .datagen import Dataset
from .dynamics.ansatz import (SLOPE_TOL, ZERO_WINDOW, AnsatzValidityReport,
                              OddHarmonicAnsatz, validate_ansatz)
from .errors import DomainError, SingularAnsatzError
from .metrics import classification_summary, r2, rmse, roc_and_auc
from .optimize import (OptimizationTrace, OptimizerConfig, ParameterSpace,
                       bayes_minimize, random_search)
from .rng import PortableRng

PROB_CLAMP = 1e-12
DEFAULT_BOUNDS = (-2.0, 2.0)

MOMENTUM_MODES = ("derivative", "matrix_det1", "matrix_halved")


@dataclass(frozen=True)
class RegressionModel:
    """Position model x(t) = x0 theta'(t) + p0 theta(t) for a known q0."""

    ansatz: OddHarmonicAnsatz
    q0: tuple[float, float]
    momentum_mode: str = "derivative"

    def __post_init__(self):
        if self.momentum_mode not in MOMENTUM_MODES:
            raise DomainError(f"unknown momentum mode {self.momentum_mode!r}")

    def predict_position(self, t):
        x0, p0 = self.q0
        return x0 * self.ansatz.d1(t) + p0 * self.ansatz.value(t)

    def predict_momentum(self, t, mode: str | None = None):
        """Conjugate-variable prediction from the same fitted ansatz.

        ``derivative`` differentiates the position model (exact because
        p = dx/dt under the quadratic trap); the matrix modes contract the
        lower row of the chosen closed-form convention and are singular at
        ansatz zeros whose slope is away from +-1.
        """
        mode = mode or self.momentum_mode
        if mode not in MOMENTUM_MODES:
            raise DomainError(f"unknown momentum mode {mode!r}")
        x0, p0 = self.q0
        if mode == "derivative":
            return x0 * self.ansatz.d2(t) + p0 * self.ansatz.d1(t)
        scalar = np.isscalar(t) or np.asarray(t).ndim == 0
        tv = np.atleast_1d(np.asarray(t, dtype=float))
        th = np.atleast_1d(self.ansatz.value(tv))
        d1 = np.atleast_1d(self.ansatz.d1(tv))
        near = np.abs(th) < ZERO_WINDOW
        bad = near & (np.abs(np.abs(d1) - 1.0) > SLOPE_TOL)
        if np.any(bad):
            raise SingularAnsatzError("matrix-mode momentum at inadmissible zero",
                                      t=float(tv[bad][0]))
        lower = np.where(near, 0.0, (d1**2 - 1.0) / np.where(near, 1.0, th))
        if mode == "matrix_halved":
            lower = lower / 2.0
        out = x0 * lower + p0 * d1
        return float(out[0]) if scalar else out


@dataclass(frozen=True)
class ClassifierModel:
    """Binary classifier: probability sigmoid(x(t)), label by threshold."""

    ansatz: OddHarmonicAnsatz
    q0: tuple[float, float]
    threshold: float = 0.5
    calibration: tuple[float, float] | None = None  # optional (scale, bias)

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise DomainError("threshold must lie strictly inside (0, 1)")

    def decision_value(self, t):
        x0, p0 = self.q0
        xi = x0 * self.ansatz.d1(t) + p0 * self.ansatz.value(t)
        if self.calibration is not None:
            scale, bias = self.calibration
            xi = scale * xi + bias
        return xi

    def probability(self, t):
        return expit(self.decision_value(t))

    def predict_label(self, t):
        prob = self.probability(t)
        out = np.asarray(prob >= self.threshold, dtype=np.int64)
        return int(out) if out.ndim == 0 else out


def regression_cost(model: RegressionModel, ds: Dataset,
                    split: str | None = None) -> float:
    """Mean squared residual of the position model on the chosen split."""
    idx = ds.indices(split)
    if len(idx) == 0:
        raise DomainError(f"no records in split {split!r}")
    pred = model.predict_position(ds.t[idx])
    return float(np.mean((ds.target[idx] - pred) ** 2))


def classification_cost(model: ClassifierModel, ds: Dataset,
                        split: str | None = None) -> float:
    """Binary cross-entropy (summed) with probabilities clamped away from 0/1."""
    if ds.label is None:
        raise DomainError("dataset carries no labels")
    idx = ds.indices(split)
    if len(idx) == 0:
        raise DomainError(f"no records in split {split!r}")
    y = ds.label[idx].astype(float)
    prob = np.clip(model.probability(ds.t[idx]), PROB_CLAMP, 1.0 - PROB_CLAMP)
    return float(-np.sum(y * np.log(prob) + (1.0 - y) * np.log(1.0 - prob)))


@dataclass(frozen=True)
class FitReport:
    """Everything one training run produced."""

    task: str
    best_params: tuple[float, ...]
    history: tuple[tuple[int, float], ...]
    train_metrics: dict
    test_metrics: dict
    seed: int
    iterations_run: int
    stop_reason: str
    q0: tuple[float, float]
    theta_validity: AnsatzValidityReport | None = None
    momentum_mode: str = "derivative"
    threshold: float | None = None
    confusion: tuple | None = None
    roc: tuple | None = None
    surrogate_fallbacks: tuple[int, ...] = ()

    @property
    def ansatz(self) -> OddHarmonicAnsatz:
        return OddHarmonicAnsatz(self.best_params)

    def regression_model(self, momentum_mode: str | None = None) -> RegressionModel:
        return RegressionModel(self.ansatz, self.q0,
                               momentum_mode or self.momentum_mode)

    def classifier_model(self) -> ClassifierModel:
        return ClassifierModel(self.ansatz, self.q0,
                               threshold=self.threshold or 0.5)

    def to_json_dict(self) -> dict:
        doc = {
            "schema": 1,
            "task": self.task,
            "best_params": list(self.best_params),
            "iterations_run": self.iterations_run,
            "stop_reason": self.stop_reason,
            "seed": self.seed,
            "train_metrics": dict(self.train_metrics),
            "test_metrics": dict(self.test_metrics),
            "history": [[i, c] for i, c in self.history],
            "theta_validity": (self.theta_validity.to_json_dict()
                               if self.theta_validity else None),
            "q0": list(self.q0),
            "momentum_mode": self.momentum_mode,
        }
        if self.threshold is not None:
            doc["threshold"] = self.threshold
        if self.confusion is not None:
            doc["confusion"] = [list(row) for row in self.confusion]
        if self.roc is not None:
            doc["roc"] = [list(p) for p in self.roc]
        if self.surrogate_fallbacks:
            doc["surrogate_fallbacks"] = list(self.surrogate_fallbacks)
        return doc

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @staticmethod
    def read_json(path) -> "FitReport":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        validity = None
        if doc.get("theta_validity"):
            tv = doc["theta_validity"]
            validity = AnsatzValidityReport(
                bounded=tv["bounded"],
                zero_crossings=tuple((t, s) for t, s in tv["zero_crossings"]),
                steady_points=tuple((t, d) for t, d in tv["steady_points"]),
                admissible=tv["admissible"])
        return FitReport(
            task=doc["task"],
            best_params=tuple(doc["best_params"]),
            history=tuple((int(i), float(c)) for i, c in doc["history"]),
            train_metrics=doc["train_metrics"],
            test_metrics=doc["test_metrics"],
            seed=int(doc["seed"]),
            iterations_run=int(doc["iterations_run"]),
            stop_reason=doc["stop_reason"],
            q0=tuple(doc["q0"]),
            theta_validity=validity,
            momentum_mode=doc.get("momentum_mode", "derivative"),
            threshold=doc.get("threshold"),
            confusion=(tuple(tuple(r) for r in doc["confusion"])
                       if doc.get("confusion") else None),
            roc=(tuple(tuple(p) for p in doc["roc"]) if doc.get("roc") else None),
            surrogate_fallbacks=tuple(doc.get("surrogate_fallbacks", ())))


def _position_design(t: np.ndarray, q0, n_params: int) -> np.ndarray:
    """Design matrix of the position model; column j belongs to coeff a_j."""
    x0, p0 = q0
    ks = 2 * np.arange(1, n_params + 1) - 1
    cols = [x0 * k * np.cos(k * t) + p0 * np.sin(k * t) for k in ks]
    return np.stack(cols, axis=1)


def _require_q0(ds: Dataset) -> tuple[float, float]:
    q0 = ds.provenance.get("q0")
    if q0 is None:
        raise DomainError("dataset provenance carries no q0; "
                          "initial conditions are fixed, never fitted")
    return float(q0[0]), float(q0[1])


def _admissibility_violation(coeffs, grid) -> float:
    report = validate_ansatz(OddHarmonicAnsatz(coeffs), grid)
    v = sum((abs(abs(s) - 1.0)) ** 2 for _, s in report.zero_crossings)
    v += sum(d**2 for _, d in report.steady_points)
    return v


def _run_optimizer(objective, n_params: int, config: OptimizerConfig,
                   bounds) -> OptimizationTrace:
    space = ParameterSpace(lower=np.full(n_params, bounds[0]),
                           upper=np.full(n_params, bounds[1]))
    runner = bayes_minimize if config.method == "bayes" else random_search
    return runner(objective, space, config)


def _history(trace: OptimizationTrace) -> tuple:
    return tuple((i, c) for i, (_, c) in enumerate(trace.evaluations))


def fit_regression(ds: Dataset, config: OptimizerConfig, n_params: int,
                   bounds=DEFAULT_BOUNDS,
                   admissibility_penalty: float = 0.0) -> FitReport:
    """Fit the position model to the train split by mean-square loss.

    The optimiser minimises the mean squared residual; the reported RMSE
    metric is its square root.  Ansatz admissibility is not enforced
    during the scan (``admissibility_penalty`` adds a soft penalty when
    nonzero); the validity report of the winning ansatz is attached.
    """
    if n_params < 1:
        raise DomainError("n_params must be positive")
    q0 = _require_q0(ds)
    tr = ds.indices("train")
    te = ds.indices("test")
    if len(tr) == 0 or len(te) == 0:
        raise DomainError("dataset needs nonempty train and test splits")
    design = _position_design(ds.t[tr], q0, n_params)
    y = ds.target[tr]
    grid = np.sort(ds.t)

    def objective(a):
        cost = float(np.mean((design @ a - y) ** 2))
        if admissibility_penalty > 0.0:
            cost += admissibility_penalty * _admissibility_violation(a, grid)
        return cost

    trace = _run_optimizer(objective, n_params, config, bounds)
    model = RegressionModel(OddHarmonicAnsatz(tuple(trace.best_params)), q0)

    def split_metrics(idx):
        pred = model.predict_position(ds.t[idx])
        return {"rmse": rmse(ds.target[idx], pred),
                "r2": r2(ds.target[idx], pred)}

    return FitReport(
        task="regression",
        best_params=tuple(trace.best_params),
        history=_history(trace),
        train_metrics=split_metrics(tr),
        test_metrics=split_metrics(te),
        seed=config.seed,
        iterations_run=len(trace.evaluations),
        stop_reason=trace.stop_reason,
        q0=q0,
        theta_validity=validate_ansatz(model.ansatz, grid),
        surrogate_fallbacks=getattr(trace, "surrogate_fallbacks", ()))


def fit_classifier(ds: Dataset, config: OptimizerConfig, n_params: int,
                   bounds=DEFAULT_BOUNDS, threshold: float = 0.5,
                   admissibility_penalty: float = 0.0) -> FitReport:
    """Fit the sigmoid classifier to the train split by cross-entropy."""
    if n_params < 1:
        raise DomainError("n_params must be positive")
    if ds.label is None:
        raise DomainError("dataset carries no labels")
    if len(np.unique(ds.label)) < 2:
        raise DomainError("degenerate dataset: only one class present")
    q0 = _require_q0(ds)
    tr = ds.indices("train")
    te = ds.indices("test")
    if len(tr) == 0 or len(te) == 0:
        raise DomainError("dataset needs nonempty train and test splits")
    if len(np.unique(ds.label[tr])) < 2:
        raise DomainError("train split holds a single class")
    design = _position_design(ds.t[tr], q0, n_params)
    y = ds.label[tr].astype(float)
    grid = np.sort(ds.t)

    def objective(a):
        prob = np.clip(expit(design @ a), PROB_CLAMP, 1.0 - PROB_CLAMP)
        cost = float(-np.sum(y * np.log(prob) + (1.0 - y) * np.log(1.0 - prob)))
        if admissibility_penalty > 0.0:
            cost += admissibility_penalty * _admissibility_violation(a, grid)
        return cost

    trace = _run_optimizer(objective, n_params, config, bounds)
    model = ClassifierModel(OddHarmonicAnsatz(tuple(trace.best_params)), q0,
                            threshold=threshold)

    def split_metrics(idx):
        prob = model.probability(ds.t[idx])
        labels = model.predict_label(ds.t[idx])
        summary = classification_summary(ds.label[idx], labels)
        roc, auc = roc_and_auc(ds.label[idx], prob)
        return ({"auc": auc, "accuracy": summary["accuracy"],
                 "precision": summary["precision"],
                 "recall": summary["recall"]},
                summary["confusion"], roc)

    train_m, _, _ = split_metrics(tr)
    test_m, conf, roc = split_metrics(te)
    return FitReport(
        task="classification",
        best_params=tuple(trace.best_params),
        history=_history(trace),
        train_metrics=train_m,
        test_metrics=test_m,
        seed=config.seed,
        iterations_run=len(trace.evaluations),
        stop_reason=trace.stop_reason,
        q0=q0,
        theta_validity=validate_ansatz(model.ansatz, grid),
        threshold=threshold,
        confusion=tuple(tuple(int(v) for v in row) for row in conf),
        roc=tuple((float(f), float(t), float(th)) for f, t, th in roc),
        surrogate_fallbacks=getattr(trace, "surrogate_fallbacks", ()))


@dataclass(frozen=True)
class MulticlassModel:
    """Combined predictor over one-vs-rest or one-vs-one binary models."""

    scheme: str  # "OvR" | "OvO"
    n_classes: int
    models: tuple  # OvR: per-class models; OvO: ((i, j), model) pairs

    def predict(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.scheme == "OvR":
            probs = self._ovr_probs(t)
            return np.argmax(probs, axis=1).astype(np.int64)
        votes = np.zeros((len(t), self.n_classes), dtype=np.int64)
        mean_prob = np.zeros((len(t), self.n_classes))
        involved = np.zeros(self.n_classes)
        for (i, j), model in self.models:
            p_j = model.probability(t)
            winner_j = p_j >= model.threshold
            votes[np.arange(len(t)), np.where(winner_j, j, i)] += 1
            mean_prob[:, j] += p_j
            mean_prob[:, i] += 1.0 - p_j
            involved[i] += 1
            involved[j] += 1
        mean_prob /= involved
        out = np.empty(len(t), dtype=np.int64)
        for r in range(len(t)):
            top = np.nonzero(votes[r] == votes[r].max())[0]
            if len(top) == 1:
                out[r] = top[0]
            else:  # tie: highest mean probability, then lowest class index
                out[r] = top[int(np.argmax(mean_prob[r][top]))]
        return out

    def _ovr_probs(self, t) -> np.ndarray:
        if self.n_classes == 2:
            p1 = self.models[0].probability(t)
            return np.stack([1.0 - p1, p1], axis=1)
        return np.stack([m.probability(t) for m in self.models], axis=1)


def fit_multiclass(ds: Dataset, n_classes: int, scheme: str,
                   config: OptimizerConfig, n_params: int = 3,
                   bounds=DEFAULT_BOUNDS,
                   ) -> tuple[list[FitReport], MulticlassModel]:
    """Reduce an N-class problem to binary fits.

    OvR trains one classifier per class (for N = 2 the single binary
    classifier is reused with the complementary probability, so decisions
    coincide with it exactly); OvO trains N(N-1)/2 pairwise classifiers
    combined by majority vote.
    """
    if ds.label is None:
        raise DomainError("dataset carries no labels")
    if scheme not in ("OvR", "OvO"):
        raise DomainError(f"unknown multiclass scheme {scheme!r}")
    if np.any(ds.label < 0) or np.any(ds.label >= n_classes):
        raise DomainError("labels outside 0..n_classes-1")
    if scheme == "OvO" and n_classes < 3:
        raise DomainError("one-vs-one needs at least three classes")
    if n_classes < 2:
        raise DomainError("need at least two classes")

    seeds = PortableRng(config.seed)
    reports: list[FitReport] = []

    if scheme == "OvR":
        models = []
        classes = [1] if n_classes == 2 else list(range(n_classes))
        for k in classes:
            sub = dc_replace(ds, label=(ds.label == k).astype(np.int64))
            sub_cfg = dc_replace(config, seed=seeds.derive(f"ovr-{k}").seed)
            rep = fit_classifier(sub, sub_cfg, n_params, bounds)
            reports.append(rep)
            models.append(rep.classifier_model())
        return reports, MulticlassModel("OvR", n_classes, tuple(models))

    pairs = [(i, j) for i in range(n_classes) for j in range(i + 1, n_classes)]
    models = []
    for i, j in pairs:
        mask = np.nonzero((ds.label == i) | (ds.label == j))[0]
        sub = ds.subset(mask)
        sub = dc_replace(sub, label=(sub.label == j).astype(np.int64))
        sub_cfg = dc_replace(config, seed=seeds.derive(f"ovo-{i}-{j}").seed)
        rep = fit_classifier(sub, sub_cfg, n_params, bounds)
        reports.append(rep)
        models.append(((i, j), rep.classifier_model()))
    return reports, MulticlassModel("OvO", n_classes, tuple(models))


def write_predictions_csv(path, t, y_true=None, y_pred=None, prob=None,
                          label_pred=None, p_pred=None) -> None:
    """Predictions CSV; columns appear in the documented order when given."""
    cols: list[tuple[str, np.ndarray]] = [("t", np.asarray(t, dtype=float))]
    for name, arr in (("y_true", y_true), ("y_pred", y_pred),
                      ("prob", prob), ("label_pred", label_pred),
                      ("p_pred", p_pred)):
        if arr is not None:
            cols.append((name, np.asarray(arr)))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(name for name, _ in cols) + "\n")
        for i in range(len(cols[0][1])):
            cells = []
            for name, arr in cols:
                v = arr[i]
                cells.append(str(int(v)) if name == "label_pred"
                             else f"{float(v):.17g}")
            fh.write(",".join(cells) + "\n")
