"""Run configuration: JSON schema, validation, resolution."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from . import presets
from .dynamics.fields import ElasticField
from .errors import ConfigError, DomainError
from .optimize import OptimizerConfig

FORMATS = ("csv", "json", "svg")
DATASET_KINDS = ("trajectory", "density")


@dataclass(frozen=True)
class RunConfig:
    """Resolved parameters of one reproducible run."""

    field_spec: ElasticField = field(default_factory=presets.reference_field)
    interval: tuple[float, float] = presets.DEFAULT_INTERVAL
    n_points: int = presets.DEFAULT_N_POINTS
    q0: tuple[float, float] = presets.DEFAULT_Q0
    noise_fraction: float = 0.1
    n_params: int = presets.DEFAULT_N_PARAMS
    seed: int = 0
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    dataset_kind: str = "trajectory"
    n_classes: int = 2
    threshold: float = 0.5
    momentum_mode: str = "derivative"
    convention: str = "det1"
    theta_coeffs: tuple[float, ...] | None = None
    x_range: tuple[float, float] = (-6.0, 6.0)
    n_x: int = 40
    target_steps: int = presets.DEFAULT_TARGET_STEPS
    split_ratio: float = 0.8
    split_strategy: str = "stratified"
    output_format: str = "csv"

    def __post_init__(self):
        if self.interval[1] <= self.interval[0]:
            raise ConfigError("interval must be increasing")
        if self.n_points < 2:
            raise ConfigError("n_points must be at least 2")
        if self.noise_fraction < 0:
            raise ConfigError("noise_fraction must be nonnegative")
        if self.n_params < 1:
            raise ConfigError("n_params must be positive")
        if self.dataset_kind not in DATASET_KINDS:
            raise ConfigError(f"unknown dataset kind {self.dataset_kind!r}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"unknown output format {self.output_format!r}")
        if not 0 < self.split_ratio < 1:
            raise ConfigError("split_ratio must lie in (0, 1)")
        if self.split_strategy not in ("shuffled", "stratified"):
            raise ConfigError(f"unknown split strategy {self.split_strategy!r}")
        if self.convention not in ("det1", "halved"):
            raise ConfigError(f"unknown convention {self.convention!r}")
        if self.momentum_mode not in ("derivative", "matrix_det1",
                                      "matrix_halved"):
            raise ConfigError(f"unknown momentum mode {self.momentum_mode!r}")
        if not 0 < self.threshold < 1:
            raise ConfigError("threshold must lie in (0, 1)")
        if self.n_classes < 2:
            raise ConfigError("n_classes must be at least 2")

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "field": self.field_spec.to_json_dict(),
            "interval": list(self.interval),
            "n_points": self.n_points,
            "q0": list(self.q0),
            "noise_fraction": self.noise_fraction,
            "n_params": self.n_params,
            "seed": self.seed,
            "optimizer": self.optimizer.to_json_dict(),
            "dataset_kind": self.dataset_kind,
            "n_classes": self.n_classes,
            "threshold": self.threshold,
            "momentum_mode": self.momentum_mode,
            "convention": self.convention,
            "theta": ({"coeffs": list(self.theta_coeffs)}
                      if self.theta_coeffs is not None else None),
            "x_range": list(self.x_range),
            "n_x": self.n_x,
            "target_steps": self.target_steps,
            "split_ratio": self.split_ratio,
            "split_strategy": self.split_strategy,
            "output_format": self.output_format,
        }

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @staticmethod
    def from_json_dict(doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a JSON object")
        known = {"schema", "field", "interval", "n_points", "q0",
                 "noise_fraction", "n_params", "seed", "optimizer",
                 "dataset_kind", "n_classes", "threshold", "momentum_mode",
                 "convention", "theta", "x_range", "n_x", "target_steps",
                 "split_ratio", "split_strategy", "output_format"}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        try:
            if "field" in doc and doc["field"] is not None:
                fdoc = doc["field"]
                if fdoc == {"kind": "reference"} or fdoc.get("kind") == "reference":
                    kwargs["field_spec"] = presets.reference_field()
                else:
                    kwargs["field_spec"] = ElasticField.from_json_dict(fdoc)
            if "interval" in doc:
                a, b = doc["interval"]
                kwargs["interval"] = (float(a), float(b))
            if "q0" in doc:
                x0, p0 = doc["q0"]
                kwargs["q0"] = (float(x0), float(p0))
            if "x_range" in doc:
                a, b = doc["x_range"]
                kwargs["x_range"] = (float(a), float(b))
            if "theta" in doc and doc["theta"] is not None:
                kwargs["theta_coeffs"] = tuple(
                    float(c) for c in doc["theta"]["coeffs"])
            if "optimizer" in doc and doc["optimizer"] is not None:
                opt = dict(doc["optimizer"])
                kwargs["optimizer"] = OptimizerConfig(**opt)
            for name, conv in (("n_points", int), ("noise_fraction", float),
                               ("n_params", int), ("seed", int),
                               ("dataset_kind", str), ("n_classes", int),
                               ("threshold", float), ("momentum_mode", str),
                               ("convention", str), ("n_x", int),
                               ("target_steps", int), ("split_ratio", float),
                               ("split_strategy", str), ("output_format", str)):
                if name in doc and doc[name] is not None:
                    kwargs[name] = conv(doc[name])
        except (TypeError, ValueError, KeyError, DomainError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        return RunConfig(**kwargs)

    @staticmethod
    def load(path) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return RunConfig.from_json_dict(doc)

    def with_overrides(self, seed: int | None = None,
                       output_format: str | None = None) -> "RunConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, seed=seed,
                          optimizer=replace(cfg.optimizer, seed=seed))
        if output_format is not None:
            cfg = replace(cfg, output_format=output_format)
        return cfg
