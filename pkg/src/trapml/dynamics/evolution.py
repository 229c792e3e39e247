"""Numerical propagation of the 2x2 canonical evolution matrix.

The matrix u(t, t0) acting on (x p)^T satisfies the linear initial-value
problem du/dt = L(t) u with L(t) = [[0, 1], [-beta(t), 0]] and
u(t0, t0) = identity.  Because tr L = 0 the exact flow is symplectic
(det u = 1); the fixed-step fourth-order scheme below preserves that to
integrator accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, IntegrationError
from .fields import ElasticField


@dataclass(frozen=True)
class EvolutionMatrix:
    """Real 2x2 evolution matrix u(t, t0) with its time labels."""

    u11: float
    u12: float
    u21: float
    u22: float
    t: float
    t0: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.u11, self.u12], [self.u21, self.u22]])

    @property
    def det(self) -> float:
        return self.u11 * self.u22 - self.u12 * self.u21

    @property
    def trace(self) -> float:
        return self.u11 + self.u22

    @staticmethod
    def identity(t0: float = 0.0) -> "EvolutionMatrix":
        return EvolutionMatrix(1.0, 0.0, 0.0, 1.0, t0, t0)

    @staticmethod
    def from_array(m: np.ndarray, t: float = 0.0, t0: float = 0.0) -> "EvolutionMatrix":
        m = np.asarray(m, dtype=float)
        return EvolutionMatrix(m[0, 0], m[0, 1], m[1, 0], m[1, 1], t, t0)


@dataclass(frozen=True)
class StabilityClass:
    """Trace-based motion classification of an evolution matrix."""

    tag: str  # "focusing" | "edge" | "defocusing"
    gamma: float
    kappa: tuple[complex, complex]


@dataclass(frozen=True)
class EvolutionPath:
    """Evolution matrices on a monotone time grid, all relative to grid[0]."""

    grid: np.ndarray
    mats: np.ndarray  # shape (n, 2, 2)

    def __len__(self) -> int:
        return len(self.grid)

    def __getitem__(self, i: int) -> EvolutionMatrix:
        return EvolutionMatrix.from_array(self.mats[i], t=float(self.grid[i]),
                                          t0=float(self.grid[0]))

    @property
    def final(self) -> EvolutionMatrix:
        return self[len(self.grid) - 1]

    def dets(self) -> np.ndarray:
        m = self.mats
        return m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]

    def traces(self) -> np.ndarray:
        return self.mats[:, 0, 0] + self.mats[:, 1, 1]

    def write_csv(self, path) -> None:
        """CSV with header t,u11,u12,u21,u22,det,gamma."""
        dets = self.dets()
        gammas = self.traces()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,u11,u12,u21,u22,det,gamma\n")
            for i, t in enumerate(self.grid):
                m = self.mats[i]
                row = (t, m[0, 0], m[0, 1], m[1, 0], m[1, 1], dets[i], gammas[i])
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _stage_values(field: ElasticField, ts: np.ndarray, h: float):
    """Field samples at step endpoints and midpoints, with finiteness check."""
    b_nodes = np.atleast_1d(np.asarray(field.value(ts), dtype=float))
    b_mid = np.atleast_1d(np.asarray(field.value(ts[:-1] + h / 2), dtype=float))
    for arr, times in ((b_nodes, ts), (b_mid, ts[:-1] + h / 2)):
        bad = ~np.isfinite(arr)
        if np.any(bad):
            raise IntegrationError("non-finite field value",
                                   t=float(np.asarray(times)[bad][0]))
    return b_nodes, b_mid


def _step_matrices(b0: np.ndarray, bm: np.ndarray, b1: np.ndarray,
                   h: float) -> np.ndarray:
    """Classical one-step fourth-order update matrices for the linear system.

    For du/dt = L(t)u the usual four-stage scheme collapses to an explicit
    2x2 step matrix S(b0, bm, b1, h); the per-step update is u <- S u.
    """
    n = len(b0)
    s = np.empty((n, 2, 2))
    s[:, 0, 0] = 1.0 - (h**2 / 6.0) * (b0 + 2.0 * bm) + (h**4 / 24.0) * b0 * bm
    s[:, 0, 1] = h - (h**3 / 6.0) * bm
    s[:, 1, 0] = (-(h / 6.0) * (b0 + 4.0 * bm + b1)
                  + (h**3 / 12.0) * bm * (b0 + b1))
    s[:, 1, 1] = 1.0 - (h**2 / 6.0) * (2.0 * bm + b1) + (h**4 / 24.0) * b1 * bm
    return s


def _scan(steps: np.ndarray, out: np.ndarray, start: np.ndarray) -> None:
    """Cumulative left-product of step matrices into ``out`` (in place)."""
    a, b, c, d = start[0, 0], start[0, 1], start[1, 0], start[1, 1]
    out[0, 0, 0], out[0, 0, 1], out[0, 1, 0], out[0, 1, 1] = a, b, c, d
    for k in range(len(steps)):
        s = steps[k]
        s11, s12, s21, s22 = s[0, 0], s[0, 1], s[1, 0], s[1, 1]
        a, b, c, d = (s11 * a + s12 * c, s11 * b + s12 * d,
                      s21 * a + s22 * c, s21 * b + s22 * d)
        out[k + 1, 0, 0], out[k + 1, 0, 1] = a, b
        out[k + 1, 1, 0], out[k + 1, 1, 1] = c, d


def integrate_evolution(field: ElasticField, t0: float, t1: float,
                        steps: int = 4000) -> EvolutionPath:
    """Propagate u(t, t0) on a uniform grid of ``steps`` intervals."""
    if not t1 > t0:
        raise DomainError("t1 must exceed t0")
    if steps < 2:
        raise DomainError("need at least 2 steps")
    h = (t1 - t0) / steps
    ts = t0 + h * np.arange(steps + 1)
    b_nodes, b_mid = _stage_values(field, ts, h)
    smats = _step_matrices(b_nodes[:-1], b_mid, b_nodes[1:], h)
    out = np.empty((steps + 1, 2, 2))
    _scan(smats, out, np.eye(2))
    return EvolutionPath(grid=ts, mats=out)


def integrate_on_grid(field: ElasticField, grid: np.ndarray,
                      target_steps: int = 4000) -> EvolutionPath:
    """Propagate u(grid[i], grid[0]) on an arbitrary monotone grid.

    Each grid interval is subdivided so the effective step matches a
    uniform ``target_steps`` budget over the whole span.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2:
        raise DomainError("grid must hold at least two times")
    dg = np.diff(grid)
    if np.any(dg <= 0):
        raise DomainError("grid must be strictly increasing")
    span = grid[-1] - grid[0]
    out = np.empty((len(grid), 2, 2))
    out[0] = np.eye(2)
    u = np.eye(2)
    for i, dt in enumerate(dg):
        m = max(1, int(round(target_steps * dt / span)))
        h = dt / m
        ts = grid[i] + h * np.arange(m + 1)
        b_nodes, b_mid = _stage_values(field, ts, h)
        smats = _step_matrices(b_nodes[:-1], b_mid, b_nodes[1:], h)
        seg = np.empty((m + 1, 2, 2))
        _scan(smats, seg, u)
        u = seg[-1]
        out[i + 1] = u
    return EvolutionPath(grid=grid, mats=out)


def classify_stability(u, tol: float = 1e-9) -> StabilityClass:
    """Classify motion by the trace criterion.

    |gamma| > 2 gives real eigenvalues (defocusing escape); |gamma| = 2
    within ``tol`` is the edge/separatrix; |gamma| < 2 gives a unit-product
    complex pair (focusing oscillation).
    """
    if isinstance(u, EvolutionMatrix):
        gamma = u.trace
    else:
        m = np.asarray(u, dtype=float)
        gamma = float(m[0, 0] + m[1, 1])
    if not np.isfinite(gamma):
        raise DomainError("matrix trace is not finite")
    root = np.sqrt(complex(gamma * gamma - 4.0))
    kappa = ((gamma + root) / 2.0, (gamma - root) / 2.0)
    if abs(abs(gamma) - 2.0) <= tol:
        tag = "edge"
    elif abs(gamma) > 2.0:
        tag = "defocusing"
    else:
        tag = "focusing"
    return StabilityClass(tag=tag, gamma=gamma, kappa=kappa)


def loop_distance(u) -> tuple[float, int]:
    """Max-norm distance of u from the closer of +identity / -identity.

    Returns ``(distance, sign)`` with sign +1 or -1 for the closer pole.
    """
    m = u.matrix if isinstance(u, EvolutionMatrix) else np.asarray(u, dtype=float)
    d_plus = float(np.max(np.abs(m - np.eye(2))))
    d_minus = float(np.max(np.abs(m + np.eye(2))))
    return (d_plus, 1) if d_plus <= d_minus else (d_minus, -1)


def detect_loop(u, tol: float) -> bool:
    """True when the evolution returned to plus or minus identity."""
    dist, _ = loop_distance(u)
    return dist <= tol
