"""Synthetic trajectory datasets: generation, noise, labels, splits, I/O."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics.evolution import integrate_on_grid
from .dynamics.fields import ElasticField
from .errors import DomainError
from .rng import PortableRng


@dataclass(frozen=True)
class Trajectory:
    """Canonical pair sampled on a time grid, evolved from q0 at grid[0]."""

    grid: np.ndarray
    x: np.ndarray
    p: np.ndarray
    q0: tuple[float, float]


def evolve_canonical(field_: ElasticField, q0: tuple[float, float],
                     grid, target_steps: int = 4000) -> Trajectory:
    """Evolve (x0, p0) through the trap field on a monotone grid."""
    grid = np.asarray(grid, dtype=float)
    path = integrate_on_grid(field_, grid, target_steps=target_steps)
    q = np.asarray(q0, dtype=float)
    vals = path.mats @ q
    return Trajectory(grid=grid, x=vals[:, 0], p=vals[:, 1],
                      q0=(float(q[0]), float(q[1])))


def add_noise(values, fraction: float, seed: int):
    """Additive Gaussian noise with sigma = fraction * sample std of values.

    Deterministic for a fixed (values, fraction, seed) triple.  A constant
    input has zero sample std; it is returned unchanged with a warning.
    """
    values = np.asarray(values, dtype=float)
    if fraction < 0:
        raise DomainError("noise fraction must be nonnegative")
    if fraction == 0:
        return values.copy()
    sd = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    if sd == 0.0:
        warnings.warn("constant input has zero spread; returning it unchanged")
        return values.copy()
    rng = PortableRng(seed)
    return values + rng.normal(len(values), sd=fraction * sd)


def label_by_median(values) -> np.ndarray:
    """1 where value >= median, else 0 (ties land in class 1)."""
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        raise DomainError("cannot label an empty vector")
    return (values >= np.median(values)).astype(np.int64)


def label_by_quantiles(values, n_classes: int) -> np.ndarray:
    """Equal-frequency class bands by quantile cutoffs.

    Class k collects values in the k-th quantile band; n_classes = 2
    reduces to the median rule.
    """
    values = np.asarray(values, dtype=float)
    if n_classes < 2:
        raise DomainError("need at least two classes")
    if n_classes > len(np.unique(values)):
        raise DomainError("more classes than distinct values")
    cutoffs = np.quantile(values, [k / n_classes for k in range(1, n_classes)])
    labels = np.zeros(len(values), dtype=np.int64)
    for c in cutoffs:
        labels += (values >= c).astype(np.int64)
    return labels


@dataclass(frozen=True)
class Dataset:
    """Records of (t [, x_coord], target [, label]) with optional split tags."""

    t: np.ndarray
    target: np.ndarray
    x_coord: np.ndarray | None = None
    label: np.ndarray | None = None
    split: np.ndarray | None = None
    noise_fraction: float = 0.0
    seed: int = 0
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.t)
        for name in ("target", "x_coord", "label", "split"):
            arr = getattr(self, name)
            if arr is not None and len(arr) != n:
                raise DomainError(f"{name} length does not match t")

    @property
    def n(self) -> int:
        return len(self.t)

    def indices(self, split: str | None) -> np.ndarray:
        if split is None:
            return np.arange(self.n)
        if self.split is None:
            raise DomainError("dataset has no split assignment")
        return np.nonzero(self.split == split)[0]

    def subset(self, idx) -> "Dataset":
        take = lambda a: None if a is None else a[idx]
        return replace(self, t=self.t[idx], target=self.target[idx],
                       x_coord=take(self.x_coord), label=take(self.label),
                       split=take(self.split))

    # -- CSV + provenance sidecar ----------------------------------------

    def write_csv(self, path) -> None:
        cols = ["t"]
        if self.x_coord is not None:
            cols.append("x_coord")
        cols.append("target")
        if self.label is not None:
            cols.append("label")
        if self.split is not None:
            cols.append("split")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(cols) + "\n")
            for i in range(self.n):
                row = [f"{self.t[i]:.17g}"]
                if self.x_coord is not None:
                    row.append(f"{self.x_coord[i]:.17g}")
                row.append(f"{self.target[i]:.17g}")
                if self.label is not None:
                    row.append(str(int(self.label[i])))
                if self.split is not None:
                    row.append(str(self.split[i]))
                fh.write(",".join(row) + "\n")

    @staticmethod
    def read_csv(path, noise_fraction: float = 0.0, seed: int = 0,
                 provenance: dict | None = None) -> "Dataset":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            rows = [line.strip().split(",") for line in fh if line.strip()]
        cols = {name: i for i, name in enumerate(header)}
        if "t" not in cols or "target" not in cols:
            raise DomainError("dataset CSV needs t and target columns")
        pull = lambda name: [r[cols[name]] for r in rows]
        t = np.array([float(v) for v in pull("t")])
        target = np.array([float(v) for v in pull("target")])
        x_coord = (np.array([float(v) for v in pull("x_coord")])
                   if "x_coord" in cols else None)
        label = (np.array([int(v) for v in pull("label")], dtype=np.int64)
                 if "label" in cols else None)
        split = (np.array(pull("split"), dtype="<U5")
                 if "split" in cols else None)
        return Dataset(t=t, target=target, x_coord=x_coord, label=label,
                       split=split, noise_fraction=noise_fraction, seed=seed,
                       provenance=provenance or {})

    def write_provenance(self, path) -> None:
        doc = {"schema": 1, "seed": self.seed,
               "noise_fraction": self.noise_fraction}
        doc.update(self.provenance)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _largest_remainder_counts(sizes: np.ndarray, ratio: float,
                              total_train: int) -> np.ndarray:
    raw = ratio * sizes
    base = np.floor(raw).astype(int)
    short = total_train - int(base.sum())
    if short > 0:
        order = np.argsort(-(raw - base), kind="stable")
        for j in order[:short]:
            base[j] += 1
    elif short < 0:
        order = np.argsort(raw - base, kind="stable")
        for j in order[:(-short)]:
            base[j] -= 1
    return base


def split_dataset(ds: Dataset, ratio: float, seed: int,
                  strategy: str = "stratified") -> Dataset:
    """Assign train/test membership; deterministic per seed.

    ``shuffled`` permutes all records and cuts at round(ratio * n).
    ``stratified`` samples proportionally per class (labelled data) or per
    time-decile (regression data), so both splits represent the whole
    record distribution; degenerate strata fall back to ``shuffled``.
    """
    if not 0 < ratio < 1:
        raise DomainError("ratio must lie strictly between 0 and 1")
    if strategy not in ("shuffled", "stratified"):
        raise DomainError(f"unknown split strategy {strategy!r}")
    n = ds.n
    n_train = int(round(ratio * n))
    rng = PortableRng(seed).derive("split")

    if strategy == "stratified":
        if ds.label is not None:
            classes = np.unique(ds.label)
            strata = [np.nonzero(ds.label == c)[0] for c in classes]
        else:
            order = np.argsort(ds.t, kind="stable")
            strata = [s for s in np.array_split(order, min(10, n)) if len(s)]
        if any(len(s) < 2 for s in strata):
            warnings.warn("stratum with fewer than 2 records; "
                          "falling back to shuffled split")
            strategy = "shuffled"

    split = np.full(n, "test", dtype="<U5")
    if strategy == "shuffled":
        perm = rng.permutation(n)
        split[perm[:n_train]] = "train"
    else:
        sizes = np.array([len(s) for s in strata])
        counts = _largest_remainder_counts(sizes, ratio, n_train)
        for s, k in zip(strata, counts):
            perm = rng.permutation(len(s))
            split[s[perm[:k]]] = "train"
    return replace(ds, split=split)


def make_trajectory_dataset(field_: ElasticField, q0, interval, n_points: int,
                            noise_fraction: float, seed: int,
                            labels: int | None = None,
                            target_steps: int = 4000,
                            ) -> tuple[Dataset, Trajectory]:
    """Standard pipeline dataset: evolve, add noise, optionally label.

    ``labels=2`` applies the median rule to the noisy targets, larger
    values use quantile bands.  Noise and labels both derive from ``seed``.
    """
    grid = np.linspace(interval[0], interval[1], n_points)
    traj = evolve_canonical(field_, q0, grid, target_steps=target_steps)
    noisy = add_noise(traj.x, noise_fraction, PortableRng(seed).derive("noise").seed)
    label = None
    if labels is not None:
        label = (label_by_median(noisy) if labels == 2
                 else label_by_quantiles(noisy, labels))
    try:
        field_doc = field_.to_json_dict()
    except DomainError:
        field_doc = {"kind": "custom"}
    prov = {"kind": "trajectory", "field": field_doc,
            "q0": [float(q0[0]), float(q0[1])],
            "interval": [float(interval[0]), float(interval[1])],
            "n_points": int(n_points), "target": "x",
            "target_steps": int(target_steps)}
    if labels is not None:
        prov["n_classes"] = int(labels)
    ds = Dataset(t=grid, target=noisy, label=label,
                 noise_fraction=float(noise_fraction), seed=int(seed),
                 provenance=prov)
    return ds, traj
