"""Generating-function ansatz for exact trap evolutions.

An admissible generating function theta(t) determines a closed-form
evolution matrix (top row (theta', theta)) and, through the self-driven
oscillator equation

    theta'' + (beta/2) theta = (theta'^2 - 1) / (2 theta),

the elastic field that realises it.  Admissibility requires slope +-1 at
every zero of theta, and a vanishing third derivative wherever theta and
the induced field are simultaneously stationary while both are nonzero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, SingularAnsatzError
from .evolution import EvolutionMatrix
from .fields import ElasticField, custom_field

# evaluation points closer to a theta zero than this are treated as the zero
ZERO_WINDOW = 1e-9
# tolerated deviation of |theta'| from 1 at a zero before it is singular
SLOPE_TOL = 1e-6


@dataclass(frozen=True)
class OddHarmonicAnsatz:
    """Odd sine series ``sum_j a_j sin((2j-1) t)``, j = 1..n_params.

    Odd in t by construction, vanishing at integer multiples of pi, with
    term-by-term analytic derivatives.
    """

    coeffs: tuple[float, ...]

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise DomainError("ansatz needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def n_params(self) -> int:
        return len(self.coeffs)

    @property
    def harmonics(self) -> np.ndarray:
        return 2 * np.arange(1, len(self.coeffs) + 1) - 1

    def _series(self, t, order: int):
        t = np.asarray(t, dtype=float)
        k = self.harmonics.astype(float)
        a = np.asarray(self.coeffs)
        phase = np.multiply.outer(t, k)
        if order % 2 == 0:
            basis = np.sin(phase)
        else:
            basis = np.cos(phase)
        sign = (-1.0) ** (order // 2)
        out = sign * np.sum(a * k**order * basis, axis=-1)
        return out if out.shape else float(out)

    def value(self, t):
        return self._series(t, 0)

    def d1(self, t):
        return self._series(t, 1)

    def d2(self, t):
        return self._series(t, 2)

    def d3(self, t):
        return self._series(t, 3)

    def to_json_dict(self) -> dict:
        return {"coeffs": list(self.coeffs)}

    @staticmethod
    def from_json_dict(doc: dict) -> "OddHarmonicAnsatz":
        return OddHarmonicAnsatz(tuple(float(c) for c in doc["coeffs"]))


@dataclass(frozen=True)
class ConstantFieldAnsatz:
    """Generating function sin(omega0 t)/omega0 of the constant field omega0**2."""

    omega0: float

    def __post_init__(self):
        if self.omega0 <= 0:
            raise DomainError("omega0 must be positive")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = np.sin(self.omega0 * t) / self.omega0
        return out if out.shape else float(out)

    def d1(self, t):
        t = np.asarray(t, dtype=float)
        out = np.cos(self.omega0 * t)
        return out if out.shape else float(out)

    def d2(self, t):
        t = np.asarray(t, dtype=float)
        out = -self.omega0 * np.sin(self.omega0 * t)
        return out if out.shape else float(out)

    def d3(self, t):
        t = np.asarray(t, dtype=float)
        out = -self.omega0**2 * np.cos(self.omega0 * t)
        return out if out.shape else float(out)


def evolution_from_ansatz(ansatz, t: float, convention: str = "det1",
                          t0: float = 0.0) -> EvolutionMatrix:
    """Closed-form evolution matrix generated by ``ansatz`` at time ``t``.

    Both conventions share the top row (theta', theta).  ``det1`` uses the
    lower-left entry (theta'^2 - 1)/theta, which keeps det u = 1 exactly;
    ``halved`` uses (theta'^2 - 1)/(2 theta), whose determinant is
    (theta'^2 + 1)/2.  At an admissible zero of theta the lower-left entry
    takes its limit value 0; a zero with slope away from +-1 is singular.
    """
    if convention not in ("det1", "halved"):
        raise DomainError(f"unknown convention {convention!r}")
    th = float(ansatz.value(t))
    d1 = float(ansatz.d1(t))
    if abs(th) < ZERO_WINDOW:
        if abs(abs(d1) - 1.0) > SLOPE_TOL:
            raise SingularAnsatzError(
                "ansatz zero with |slope| != 1 has no finite closed form", t=t)
        lower = 0.0
    else:
        lower = (d1 * d1 - 1.0) / th
        if convention == "halved":
            lower /= 2.0
    return EvolutionMatrix(d1, th, lower, d1, t=float(t), t0=t0)


def ansatz_top_row(ansatz, t):
    """Vectorised top row (theta'(t), theta(t)) of the closed-form matrix."""
    return ansatz.d1(t), ansatz.value(t)


def stiffness_from_ansatz(ansatz, t, on_singular: str = "raise"):
    """Elastic field value induced by the ansatz at time ``t``.

    Rearranges the self-driven oscillator equation to
    beta = (theta'^2 - 1)/theta^2 - 2 theta''/theta.  At an admissible
    zero the removable limit theta''^2 - theta' theta''' is used; a zero
    with slope away from +-1 raises :class:`SingularAnsatzError`
    (``on_singular="nan"`` records NaN instead).
    """
    if on_singular not in ("raise", "nan"):
        raise DomainError(f"unknown singularity policy {on_singular!r}")
    scalar = np.isscalar(t) or np.asarray(t).ndim == 0
    tv = np.atleast_1d(np.asarray(t, dtype=float))
    th = np.atleast_1d(ansatz.value(tv))
    v1 = np.atleast_1d(ansatz.d1(tv))
    v2 = np.atleast_1d(ansatz.d2(tv))
    near = np.abs(th) < ZERO_WINDOW
    bad = near & (np.abs(np.abs(v1) - 1.0) > SLOPE_TOL)
    if np.any(bad) and on_singular == "raise":
        raise SingularAnsatzError("field is singular at an inadmissible zero",
                                  t=float(tv[bad][0]))
    safe = np.where(near, 1.0, th)
    beta = (v1**2 - 1.0) / safe**2 - 2.0 * v2 / safe
    if np.any(near):
        v3 = np.atleast_1d(ansatz.d3(tv))
        beta = np.where(near, v2**2 - v1 * v3, beta)
        beta = np.where(bad, np.nan, beta)
    return float(beta[0]) if scalar else beta


def field_from_ansatz(ansatz) -> ElasticField:
    """Wrap the induced stiffness as a custom field profile."""
    return custom_field(lambda t: stiffness_from_ansatz(ansatz, t))


def stiffness_rate_from_ansatz(ansatz, t):
    """Analytic time derivative of the induced stiffness (theta != 0)."""
    th = ansatz.value(t)
    v1 = ansatz.d1(t)
    v2 = ansatz.d2(t)
    v3 = ansatz.d3(t)
    return 4.0 * v1 * v2 / th**2 - 2.0 * v1 * (v1**2 - 1.0) / th**3 - 2.0 * v3 / th


def ansatz_field_residual(ansatz, field: ElasticField, grid,
                          zero_window: float = ZERO_WINDOW) -> float:
    """Max deviation from the self-driven oscillator equation on a grid.

    Grid points inside the exclusion window around theta zeros are
    skipped; the residual is max |theta'' + (beta/2) theta -
    (theta'^2 - 1)/(2 theta)|.
    """
    grid = np.asarray(grid, dtype=float)
    th = np.asarray(ansatz.value(grid))
    keep = np.abs(th) >= zero_window
    if not np.any(keep):
        raise DomainError("entire grid sits inside the theta-zero window")
    tg = grid[keep]
    th = th[keep]
    v1 = np.asarray(ansatz.d1(tg))
    v2 = np.asarray(ansatz.d2(tg))
    beta = np.asarray(field.value(tg), dtype=float)
    res = v2 + 0.5 * beta * th - (v1**2 - 1.0) / (2.0 * th)
    return float(np.max(np.abs(res)))


@dataclass(frozen=True)
class AnsatzValidityReport:
    """Admissibility diagnostics of a generating function on an interval."""

    bounded: bool
    zero_crossings: tuple[tuple[float, float], ...]   # (t, slope there)
    steady_points: tuple[tuple[float, float], ...]    # (t, third derivative)
    admissible: bool

    def to_json_dict(self) -> dict:
        return {
            "bounded": self.bounded,
            "zero_crossings": [[t, s] for t, s in self.zero_crossings],
            "steady_points": [[t, d] for t, d in self.steady_points],
            "admissible": self.admissible,
        }


def _bisect_zero(fn, lo: float, hi: float, tol: float = 1e-12) -> float:
    flo = fn(lo)
    if flo == 0.0:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        if fmid == 0.0:
            return mid
        if (flo < 0) != (fmid < 0):
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def _grid_zeros(fn, grid: np.ndarray, atol: float) -> list[float]:
    vals = np.asarray([float(fn(t)) for t in grid])
    zs: list[float] = []
    for i, t in enumerate(grid):
        if abs(vals[i]) <= atol:
            zs.append(float(t))
    for i in range(len(grid) - 1):
        if abs(vals[i]) > atol and abs(vals[i + 1]) > atol and vals[i] * vals[i + 1] < 0:
            zs.append(_bisect_zero(fn, float(grid[i]), float(grid[i + 1])))
    zs.sort()
    merged: list[float] = []
    for z in zs:
        if not merged or z - merged[-1] > 1e-9:
            merged.append(z)
    return merged


def validate_ansatz(ansatz, grid, tol: float = 1e-6) -> AnsatzValidityReport:
    """Check the admissibility conditions of a generating function.

    Zero crossings of theta are refined by bisection and must carry slope
    of magnitude 1; simultaneous stationary points of theta and the
    induced field (with both nonzero) must have vanishing third
    derivative.  The report records every located point either way.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing")
    values = np.asarray(ansatz.value(grid))
    bounded = bool(np.all(np.isfinite(values)))

    crossings = []
    for z in _grid_zeros(ansatz.value, grid, atol=ZERO_WINDOW):
        crossings.append((z, float(ansatz.d1(z))))

    steady = []
    for z in _grid_zeros(ansatz.d1, grid, atol=tol * 1e-3):
        th = float(ansatz.value(z))
        if abs(th) <= tol:
            continue
        beta = stiffness_from_ansatz(ansatz, z)
        if abs(beta) <= tol:
            continue
        rate = float(stiffness_rate_from_ansatz(ansatz, z))
        if abs(rate) <= tol:
            steady.append((z, float(ansatz.d3(z))))

    ok_slopes = all(abs(abs(s) - 1.0) <= tol for _, s in crossings)
    ok_steady = all(abs(d) <= tol for _, d in steady)
    return AnsatzValidityReport(
        bounded=bounded,
        zero_crossings=tuple(crossings),
        steady_points=tuple(steady),
        admissible=bool(bounded and ok_slopes and ok_steady),
    )
