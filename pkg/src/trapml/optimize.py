"""Derivative-free minimisation over a box.

Gaussian-process Bayesian optimisation with expected improvement plus a
seeded random-search baseline.  Everything is deterministic per seed; the
only randomness is the portable stream in :mod:`trapml.rng`.

Surrogate: squared-exponential kernel with per-dimension length scale
0.2 * box width, signal variance equal to the variance of the
standardised observations, and a 1e-6 diagonal jitter (escalated to 1e-4
on a Cholesky failure, then a uniform fallback proposal for that
iteration).  Acquisition: candidate pools of 1024 gradient-free random
points (512 uniform over the box, 512 Gaussian perturbations of the
incumbent at shrinking scales, clipped to the box).  Iterations alternate
between maximising expected improvement over the pool and evaluating the
pool's posterior-mean minimiser; EI alone dithers between exploration and
polish on smooth objectives and misses the optimiser accuracy bar.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .errors import DomainError
from .rng import PortableRng

_JITTERS = (1e-6, 1e-4)
_LOCAL_RUNGS = ((0.2, 128), (0.05, 128), (0.01, 128), (0.002, 128))
_N_UNIFORM = 512
_EI_EXHAUSTED = 1e-12


@dataclass(frozen=True)
class ParameterSpace:
    """Axis-aligned search box."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise DomainError("lower/upper must be equal-length vectors")
        if not np.all(lo < hi):
            raise DomainError("lower bounds must be strictly below upper bounds")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dimension(self) -> int:
        return len(self.lower)

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def uniform(self, rng: PortableRng, n: int) -> np.ndarray:
        u = rng.random(n * self.dimension).reshape(n, self.dimension)
        return self.lower + self.width * u

    def latin_hypercube(self, rng: PortableRng, n: int) -> np.ndarray:
        """One point per stratum and dimension, stratum order shuffled."""
        d = self.dimension
        out = np.empty((n, d))
        for j in range(d):
            perm = rng.permutation(n)
            u = rng.random(n)
            out[:, j] = self.lower[j] + self.width[j] * (perm + u) / n
        return out


_STOP_REASONS = ("budget", "patience", "converged")


@dataclass(frozen=True)
class OptimizerConfig:
    budget: int = 150
    init_points: int = 10
    patience: int = 15
    min_improvement: float = 1e-4
    seed: int = 0
    method: str = "bayes"

    def __post_init__(self):
        if not self.budget >= self.init_points >= 1:
            raise DomainError("need budget >= init_points >= 1")
        if self.patience < 1:
            raise DomainError("patience must be at least 1")
        if self.method not in ("bayes", "random"):
            raise DomainError(f"unknown optimiser method {self.method!r}")

    def to_json_dict(self) -> dict:
        return {"budget": self.budget, "init_points": self.init_points,
                "patience": self.patience,
                "min_improvement": self.min_improvement,
                "seed": self.seed, "method": self.method}


@dataclass(frozen=True)
class OptimizationTrace:
    """Every objective evaluation in order, plus how the run stopped."""

    evaluations: tuple[tuple[tuple[float, ...], float], ...]
    best_index: int
    stop_reason: str
    surrogate_fallbacks: tuple[int, ...] = field(default=())

    @property
    def best_params(self) -> np.ndarray:
        return np.asarray(self.evaluations[self.best_index][0])

    @property
    def best_cost(self) -> float:
        return self.evaluations[self.best_index][1]

    def costs(self) -> np.ndarray:
        return np.asarray([c for _, c in self.evaluations])

    def to_json_dict(self) -> dict:
        return {"evaluations": [[list(p), c] for p, c in self.evaluations],
                "best_index": self.best_index,
                "stop_reason": self.stop_reason,
                "surrogate_fallbacks": list(self.surrogate_fallbacks)}


def expected_improvement(mu, sigma, best):
    """Closed-form EI for minimisation; at sigma = 0 it is max(best - mu, 0)."""
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma < 0):
        raise DomainError("sigma must be nonnegative")
    imp = best - mu
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sigma > 0, imp / np.where(sigma > 0, sigma, 1.0), 0.0)
    ei = np.where(sigma > 0,
                  imp * norm.cdf(z) + sigma * norm.pdf(z),
                  np.maximum(imp, 0.0))
    return float(ei) if ei.ndim == 0 else ei


def _sqexp(xa: np.ndarray, xb: np.ndarray, ls: np.ndarray) -> np.ndarray:
    d2 = np.sum(((xa[:, None, :] - xb[None, :, :]) / ls) ** 2, axis=-1)
    return np.exp(-0.5 * d2)


def _fit_gp(x: np.ndarray, y_std: np.ndarray, ls: np.ndarray, sf2: float):
    """Cholesky fit with jitter escalation; returns (L, alpha, jitter)."""
    k = sf2 * _sqexp(x, x, ls)
    err = None
    for jitter in _JITTERS:
        try:
            chol = np.linalg.cholesky(k + jitter * np.eye(len(x)))
        except np.linalg.LinAlgError as exc:  # escalate
            err = exc
            continue
        alpha = np.linalg.solve(chol.T, np.linalg.solve(chol, y_std))
        return chol, alpha, jitter
    raise np.linalg.LinAlgError(str(err))


def _gp_posterior(chol, alpha, x, xq, ls, sf2):
    ks = sf2 * _sqexp(xq, x, ls)
    mu = ks @ alpha
    v = np.linalg.solve(chol, ks.T)
    var = np.maximum(sf2 - np.sum(v**2, axis=0), 0.0)
    return mu, np.sqrt(var)


def _evaluate(objective, x) -> float:
    y = float(objective(np.asarray(x, dtype=float)))
    if not np.isfinite(y):
        raise DomainError(f"objective returned non-finite value at {x!r}")
    return y


class _Stopper:
    """Patience bookkeeping over the running best cost."""

    def __init__(self, min_improvement: float, patience: int):
        self.min_improvement = min_improvement
        self.patience = patience
        self.best = np.inf
        self.streak = 0

    def push(self, cost: float) -> None:
        if cost < self.best - self.min_improvement:
            self.best = min(self.best, cost)
            self.streak = 0
        else:
            self.best = min(self.best, cost)
            self.streak += 1

    @property
    def exhausted(self) -> bool:
        return self.streak >= self.patience


def _candidate_pool(rng: PortableRng, space: ParameterSpace,
                    incumbent: np.ndarray) -> np.ndarray:
    d = space.dimension
    pools = [space.uniform(rng, _N_UNIFORM)]
    for scale, count in _LOCAL_RUNGS:
        z = rng.normal(count * d).reshape(count, d)
        pts = incumbent + scale * space.width * z
        pools.append(np.clip(pts, space.lower, space.upper))
    return np.vstack(pools)


def bayes_minimize(objective, space: ParameterSpace,
                   config: OptimizerConfig) -> OptimizationTrace:
    """GP/EI minimisation of a pure objective over the box.

    Starts from a seeded Latin-hypercube design, then alternates
    EI-maximisation steps with posterior-mean exploitation steps over
    fresh candidate pools.  Stops on the evaluation budget, on ``patience``
    evaluations without improvement beyond ``min_improvement``, or when
    the acquisition is exhausted.
    """
    rng = PortableRng(config.seed).derive("bayes")
    ls = 0.2 * space.width
    evals: list[tuple[tuple[float, ...], float]] = []
    stopper = _Stopper(config.min_improvement, config.patience)
    fallbacks: list[int] = []

    for x in space.latin_hypercube(rng, config.init_points):
        cost = _evaluate(objective, x)
        evals.append((tuple(x), cost))
        stopper.push(cost)

    stop_reason = "budget"
    iteration = 0
    while len(evals) < config.budget:
        if stopper.exhausted:
            stop_reason = "patience"
            break
        xa = np.asarray([p for p, _ in evals])
        ya = np.asarray([c for _, c in evals])
        sd = ya.std()
        ys = (ya - ya.mean()) / (sd if sd > 0 else 1.0)
        sf2 = max(float(np.var(ys)), 1e-12)
        incumbent = xa[int(np.argmin(ya))]
        cand = _candidate_pool(rng, space, incumbent)
        try:
            chol, alpha, _ = _fit_gp(xa, ys, ls, sf2)
        except np.linalg.LinAlgError:
            fallbacks.append(len(evals))
            x_next = cand[0]
        else:
            mu, sigma = _gp_posterior(chol, alpha, xa, cand, ls, sf2)
            if iteration % 2 == 0:
                ei = expected_improvement(mu, sigma, float(ys.min()))
                if float(np.max(ei)) < _EI_EXHAUSTED:
                    stop_reason = "converged"
                    break
                x_next = cand[int(np.argmax(ei))]
            else:
                x_next = cand[int(np.argmin(mu))]
        iteration += 1
        cost = _evaluate(objective, x_next)
        evals.append((tuple(x_next), cost))
        stopper.push(cost)
    else:
        stop_reason = "budget"

    costs = np.asarray([c for _, c in evals])
    return OptimizationTrace(evaluations=tuple(evals),
                             best_index=int(np.argmin(costs)),
                             stop_reason=stop_reason,
                             surrogate_fallbacks=tuple(fallbacks))


def random_search(objective, space: ParameterSpace,
                  config: OptimizerConfig) -> OptimizationTrace:
    """Seeded uniform sampling baseline with the same stopping rules."""
    rng = PortableRng(config.seed).derive("random-search")
    evals: list[tuple[tuple[float, ...], float]] = []
    stopper = _Stopper(config.min_improvement, config.patience)
    stop_reason = "budget"
    while len(evals) < config.budget:
        if len(evals) >= config.init_points and stopper.exhausted:
            stop_reason = "patience"
            break
        x = space.uniform(rng, 1)[0]
        cost = _evaluate(objective, x)
        evals.append((tuple(x), cost))
        stopper.push(cost)
    costs = np.asarray([c for _, c in evals])
    return OptimizationTrace(evaluations=tuple(evals),
                             best_index=int(np.argmin(costs)),
                             stop_reason=stop_reason)
