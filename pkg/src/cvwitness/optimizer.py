"""
Search for quadrature weights that maximise the weighted-covariance violation.

Nothing here is guaranteed to find the global optimum.  The search runs
compass-style pattern search on the product of the two unit spheres
(``||a|| = ||b|| = 1``), because the score

    f(a, b) = ||C(a, b)|| - sqrt(bracket_A(a) * bracket_B(b))

is invariant under rescaling either side and is nonsmooth wherever singular
values cross.  ``f > 0`` exactly when :func:`~cvwitness.gaussian.prop1a_check`
detects.  Reported weights are rescaled so that the largest ``|a_i|`` and the
largest ``|b_j|`` both equal 1.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constants import DETECTION_TOL, MIN_STEP
from .exceptions import InputError
from .gaussian import WeightVector, prop1a_check
from .matcore import trace_norm
from .reports import CriterionReport

__all__ = ["OptimizerConfig", "OptimizationResult", "objective", "optimize_weights"]


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    max_iters: int = 500
    seed: int = 0
    step_shrink: float = 0.5
    initial_step: float = 0.25
    min_step: float = MIN_STEP
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise InputError("restarts must be >= 1")
        if self.max_iters < 1:
            raise InputError("max_iters must be >= 1")
        if not 0.0 < self.step_shrink < 1.0:
            raise InputError("step_shrink must lie in (0, 1)")
        if not self.initial_step > 0.0:
            raise InputError("initial_step must be positive")
        if not 0.0 < self.min_step < self.initial_step:
            raise InputError("min_step must lie in (0, initial_step)")
        if self.workers < 1:
            raise InputError("workers must be >= 1")


@dataclass
class OptimizationResult:
    best_weights: WeightVector
    best_report: CriterionReport
    best_objective: float
    objective_trace: list = field(default_factory=list)
    converged: bool = False
    best_restart: int = 0


class _Problem:
    """Precomputed pieces of the score for one (state, partition) pair."""

    def __init__(self, cov, part):
        part.check(cov)
        sa, sb = part.slices()
        v = cov.covariance
        self.cross = v[sa, sb]
        self.var_a = np.diag(v)[sa]
        self.var_b = np.diag(v)[sb]
        self.na = 2 * part.m_modes_A
        self.nb = 2 * part.n_modes_B

    def scores(self, x):
        """Score of each row of ``x = [a | b]`` after per-side normalisation."""
        x = np.atleast_2d(x)
        a = x[:, :self.na]
        b = x[:, self.na:]
        a = a / np.linalg.norm(a, axis=1, keepdims=True)
        b = b / np.linalg.norm(b, axis=1, keepdims=True)
        c = a[:, :, None] * b[:, None, :] * self.cross
        norm_c = trace_norm(c)
        br_a = np.sum(a**2 * self.var_a, 1) - np.sum(np.abs(a[:, 0::2] * a[:, 1::2]), 1)
        br_b = np.sum(b**2 * self.var_b, 1) - np.sum(np.abs(b[:, 0::2] * b[:, 1::2]), 1)
        ok = (br_a >= 0.0) & (br_b >= 0.0)
        out = np.full(x.shape[0], -np.inf)
        out[ok] = norm_c[ok] - np.sqrt(br_a[ok] * br_b[ok])
        return out


def objective(cov, part, w):
    """``||C|| - sqrt(bracket_A * bracket_B)`` at the unit-normalised weights.

    Positive exactly when the weighted covariance test detects.
    """
    w.check(part)
    bracket_test = prop1a_check(cov, part, w)
    if bracket_test.status != "ok":
        raise InputError("marginal brackets are negative; objective undefined")
    return float(_Problem(cov, part).scores(np.concatenate([w.a, w.b]))[0])


def _run_restart(problem, config, index):
    rng = np.random.default_rng([config.seed, index])
    dim = problem.na + problem.nb
    x = rng.standard_normal(dim)
    f = problem.scores(x)[0]
    while not np.isfinite(f):
        x = rng.standard_normal(dim)
        f = problem.scores(x)[0]

    directions = np.vstack([np.eye(dim), -np.eye(dim)])
    step = config.initial_step
    trace = [(0, float(f))]
    converged = False
    for it in range(1, config.max_iters + 1):
        polls = x + step * directions
        scores = problem.scores(polls)
        k = int(np.argmax(scores))
        if scores[k] > f:
            x, f = polls[k], scores[k]
            na = problem.na
            x[:na] /= np.linalg.norm(x[:na])
            x[na:] /= np.linalg.norm(x[na:])
        else:
            step *= config.step_shrink
        trace.append((it, float(f)))
        if step < config.min_step:
            converged = True
            break
    return x, float(f), trace, converged


def _max_abs_scaled(w):
    return w / np.max(np.abs(w))


def optimize_weights(cov, part, config=None, tol=DETECTION_TOL):
    """Multi-start pattern search for weights violating the covariance test.

    Restart ``k`` draws its start from ``default_rng([seed, k])``, so results
    do not depend on ``config.workers``.  Among restarts the highest score
    wins and ties go to the lowest restart index.  ``objective_trace`` lists
    ``(cumulative iteration, best score so far)`` over the restarts in index
    order.
    """
    config = OptimizerConfig() if config is None else config
    problem = _Problem(cov, part)
    indices = range(config.restarts)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            runs = list(pool.map(lambda i: _run_restart(problem, config, i), indices))
    else:
        runs = [_run_restart(problem, config, i) for i in indices]

    best_idx = 0
    for i, run in enumerate(runs):
        if run[1] > runs[best_idx][1]:
            best_idx = i

    trace = []
    offset = 0
    best_so_far = -np.inf
    for _, _, run_trace, _ in runs:
        for it, value in run_trace:
            best_so_far = max(best_so_far, value)
            trace.append((offset + it, best_so_far))
        offset += run_trace[-1][0] + 1

    x, f, _, converged = runs[best_idx]
    weights = WeightVector(_max_abs_scaled(x[:problem.na]), _max_abs_scaled(x[problem.na:]))
    report = prop1a_check(cov, part, weights, tol=tol)
    return OptimizationResult(
        best_weights=weights,
        best_report=report,
        best_objective=f,
        objective_trace=trace,
        converged=converged,
        best_restart=best_idx,
    )
