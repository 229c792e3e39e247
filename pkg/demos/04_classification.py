"""Binary and multiclass classification of canonical observables.

Labels come from the median (binary) or quantile bands (3 classes) of a
noisy trajectory; the classifier pushes the position model through a
logistic sigmoid and is trained by cross-entropy.
"""
import pathlib

import numpy as np

import trapml as tm
from trapml.presets import DEFAULT_INTERVAL
from trapml.rng import PortableRng

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

SEED = 11
field = tm.constant_field(1.0)

# --- binary: median split at 30% noise ----------------------------------------
ds, _ = tm.make_trajectory_dataset(field, (1.0, 1.0), DEFAULT_INTERVAL,
                                   500, 0.30, SEED, labels=2)
ds = tm.split_dataset(ds, 0.8, PortableRng(SEED).derive("split").seed)
cfg = tm.OptimizerConfig(budget=150, init_points=10, patience=15, seed=SEED)
report = tm.fit_classifier(ds, cfg, n_params=3, threshold=0.5)
print(f"binary fit: {report.iterations_run} evaluations ({report.stop_reason})")
print(f"test AUC {report.test_metrics['auc']:.4f}, "
      f"accuracy {report.test_metrics['accuracy']:.3f}, "
      f"precision {report.test_metrics['precision']:.3f}, "
      f"recall {report.test_metrics['recall']:.3f}")
print("test confusion matrix (rows true, cols predicted):")
for row in report.confusion:
    print("  ", row)

from trapml.plot import roc_plot

roc_plot(OUT / "roc.svg", report.roc, report.test_metrics["auc"],
         title="binary test ROC")

# --- multiclass: 3 quantile bands, OvR vs OvO ---------------------------------
ds3, _ = tm.make_trajectory_dataset(field, (1.0, 1.0), DEFAULT_INTERVAL,
                                    450, 0.30, SEED + 1, labels=3)
ds3 = tm.split_dataset(ds3, 0.8, PortableRng(SEED + 1).derive("split").seed)
te = ds3.indices("test")
for scheme in ("OvR", "OvO"):
    reports, model = tm.fit_multiclass(
        ds3, 3, scheme, tm.OptimizerConfig(budget=80, init_points=10,
                                           patience=15, seed=SEED))
    pred = model.predict(ds3.t[te])
    acc = float(np.mean(pred == ds3.label[te]))
    recalls = [float(np.mean(pred[ds3.label[te] == k] == k)) for k in range(3)]
    print(f"\n{scheme}: {len(reports)} binary fits, test accuracy {acc:.3f} "
          f"(chance 0.333), per-class recall {np.round(recalls, 3)}")

print(f"\nwrote {OUT / 'roc.svg'}")
