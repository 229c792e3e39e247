"""Time-dependent elastic (stiffness) fields of the quadratic trap."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import DomainError

FieldKind = str  # "harmonic" | "constant" | "custom"


@dataclass(frozen=True)
class ElasticField:
    """Dimensionless elastic coefficient of the trap along one axis.

    ``harmonic`` fields are finite cosine superpositions
    ``sum_j amp_j * cos(freq_j * t)`` and are therefore even in t;
    ``constant`` fields evaluate to a fixed stiffness; ``custom`` wraps an
    arbitrary profile callable.
    """

    kind: FieldKind
    terms: tuple[tuple[float, float], ...] = ()
    profile: Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("harmonic", "constant", "custom"):
            raise DomainError(f"unknown field kind {self.kind!r}")
        if self.kind == "custom" and self.profile is None:
            raise DomainError("custom field requires a profile callable")
        if self.kind == "constant" and len(self.terms) != 1:
            raise DomainError("constant field stores exactly one (value, 0) term")

    def value(self, t):
        """Evaluate the field at scalar or array ``t``."""
        t = np.asarray(t, dtype=float)
        if self.kind == "custom":
            out = np.asarray(self.profile(t), dtype=float)
            return out if out.shape else float(out)
        amps = np.array([a for a, _ in self.terms])
        freqs = np.array([w for _, w in self.terms])
        out = np.sum(amps * np.cos(np.multiply.outer(t, freqs)), axis=-1)
        return out if out.shape else float(out)

    def to_json_dict(self) -> dict:
        if self.kind == "custom":
            raise DomainError("custom profiles have no JSON form")
        if self.kind == "constant":
            return {"kind": "constant", "value": self.terms[0][0]}
        return {"kind": "harmonic", "terms": [[a, w] for a, w in self.terms]}

    @staticmethod
    def from_json_dict(doc: dict) -> "ElasticField":
        kind = doc.get("kind")
        if kind == "constant":
            return constant_field(float(doc["value"]))
        if kind == "harmonic":
            return harmonic_field([(float(a), float(w)) for a, w in doc["terms"]])
        raise DomainError(f"cannot deserialize field kind {kind!r}")


def harmonic_field(terms: Sequence[tuple[float, float]]) -> ElasticField:
    """Cosine superposition ``sum_j amp_j cos(freq_j t)``."""
    return ElasticField(kind="harmonic", terms=tuple((float(a), float(w)) for a, w in terms))


def constant_field(value: float) -> ElasticField:
    """Constant stiffness; ``value`` is typically ``omega0**2``."""
    return ElasticField(kind="constant", terms=((float(value), 0.0),),
                        profile=None)


def custom_field(profile: Callable[[np.ndarray], np.ndarray]) -> ElasticField:
    return ElasticField(kind="custom", terms=(), profile=profile)


def field_from_magnetic_length(magnetic_length: Callable[[np.ndarray], np.ndarray],
                               scale: float) -> ElasticField:
    """Stiffness induced by a time-dependent magnetic length.

    The field is ``(scale / lB(t)**2)**2``, nonnegative by construction.
    Raises :class:`DomainError` when the length profile is not strictly
    positive at an evaluated time.
    """

    def profile(t):
        lb = np.asarray(magnetic_length(t), dtype=float)
        if np.any(lb <= 0) or not np.all(np.isfinite(lb)):
            raise DomainError("magnetic length must be positive and finite")
        return (scale / lb**2) ** 2

    return custom_field(profile)
