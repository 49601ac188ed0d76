"""One-way adaptive local strategy by backward dynamic programming on the
prior of state 0, plus two independent checks: the exhaustive outcome tree
(small N) and Monte Carlo rollouts of the tabulated policy.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._optim import golden_max
from .errors import DomainError, ResourceError
from .local import N_GRID, outcome_probs
from .qubit import StatePair

DEFAULT_POINTS = 20000
ANGLE_TOL = 1e-10
TREE_BUDGET = 2 * 10 ** 7


@dataclass(frozen=True)
class PriorGrid:
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        if self.points < 2:
            raise DomainError(f"grid needs at least 2 points, got {self.points}")

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.points)


@dataclass
class ValueTable:
    # values[n] is S*_n on the grid nodes, n = 0..N
    values: np.ndarray = field(repr=False)


@dataclass
class Policy:
    # angles[n - 1] is the measurement angle on copy n, given the prior before it
    angles: np.ndarray = field(repr=False)
    grid: PriorGrid = field(default_factory=PriorGrid)

    @property
    def n_copies(self) -> int:
        return len(self.angles)

    def angle(self, copy: int, prior: np.ndarray) -> np.ndarray:
        """Nearest-node policy lookup for copy ``copy`` (1-based)."""
        g = self.grid.points
        idx = np.clip(np.rint(np.asarray(prior) * (g - 1)).astype(int), 0, g - 1)
        return self.angles[copy - 1][idx]


@dataclass
class AdaptiveResult:
    error: float
    values: ValueTable
    policy: Policy
    grid: PriorGrid
    status: str = "ok"
    # angle of the first measurement at the equal prior
    first_angle: float = math.nan


def bayes_update(prior, outcome: int, theta_meas, pair: StatePair):
    """Posterior of state 0 after observing ``outcome`` (0 is '+', 1 is '-')."""
    p0, p1 = outcome_probs(pair, theta_meas)
    if outcome == 1:
        p0, p1 = 1 - p0, 1 - p1
    prior = np.asarray(prior, dtype=float)
    marginal = p0 * prior + p1 * (1 - prior)
    if np.any(marginal <= 0):
        raise DomainError("outcome has zero probability under the current prior")
    post = p0 * prior / marginal
    return float(post) if post.ndim == 0 else post


def _uniform_interp(table: np.ndarray):
    """Piecewise-linear interpolant of values tabulated on linspace(0, 1, len(table))."""
    last = len(table) - 1
    slopes = np.diff(table)

    def fn(prior):
        x = np.asarray(prior) * last
        i = np.minimum(x.astype(np.intp), last - 1)
        return table[i] + (x - i) * slopes[i]
    return fn


def _continuation(pair: StatePair, value_fn, prior, theta):
    """sum over outcomes of P(outcome) * S*(posterior); broadcasts prior vs theta."""
    p0, p1 = outcome_probs(pair, theta)
    total = 0.0
    for q0, q1 in ((p0, p1), (1 - p0, 1 - p1)):
        joint0 = q0 * prior
        marginal = joint0 + q1 * (1 - prior)
        safe = np.where(marginal > 0, marginal, 1.0)
        post = np.clip(joint0 / safe, 0.0, 1.0)
        total = total + np.where(marginal > 0, marginal * value_fn(post), 0.0)
    return total


def _backup(pair: StatePair, value_fn, prior, angles, refine: bool):
    """One DP stage at the given priors: best angle and its value."""
    prior = np.asarray(prior, dtype=float)
    coarse = _continuation(pair, value_fn, prior[:, None], angles[None, :])
    best = np.argmax(coarse, axis=1)
    theta = angles[best]
    value = coarse[np.arange(len(prior)), best]
    if refine and len(angles) > 1:
        step = angles[1] - angles[0]
        lo = np.clip(theta - step, angles[0], angles[-1])
        hi = np.clip(theta + step, angles[0], angles[-1])
        t_ref, v_ref = golden_max(lambda t: _continuation(pair, value_fn, prior, t),
                                  lo, hi, tol=ANGLE_TOL)
        better = v_ref > value
        theta = np.where(better, t_ref, theta)
        value = np.where(better, v_ref, value)
    return theta, value


def _terminal(prior):
    return np.maximum(prior, 1.0 - prior)


def default_angles(n_grid: int = N_GRID) -> np.ndarray:
    return np.linspace(0.0, math.pi, n_grid)


def dp_solve(pair: StatePair, n: int, grid: PriorGrid | None = None,
             angles: np.ndarray | None = None, refine: bool = True) -> AdaptiveResult:
    """Optimal one-way adaptive error for N copies.

    Value tables are linearly interpolated between prior nodes; the angle
    search is a coarse grid followed by golden-section refinement.
    """
    if n < 1:
        raise DomainError(f"N={n} must be >= 1")
    grid = grid or PriorGrid()
    angles = default_angles() if angles is None else np.asarray(angles, dtype=float)
    nodes = grid.nodes
    values = np.empty((n + 1, grid.points))
    policy = np.empty((n, grid.points))
    values[n] = _terminal(nodes)
    for stage in range(n, 0, -1):
        theta, val = _backup(pair, _uniform_interp(values[stage]), nodes, angles, refine)
        # certain priors are absorbing; keep them exact
        val[0] = val[-1] = 1.0
        policy[stage - 1] = theta
        values[stage - 1] = val

    theta0, s0 = _backup(pair, _uniform_interp(values[1]), np.array([0.5]), angles, refine)
    status = "ok"
    if np.any(values[:-1] < values[1:] - 1e-12):
        status = "warning: value table not monotone in stage"
        warnings.warn(status)
    error = float(np.clip(1.0 - s0[0], 0.0, 0.5))
    return AdaptiveResult(error, ValueTable(values), Policy(policy, grid), grid, status,
                          float(theta0[0]))


def dp_exact(pair: StatePair, n: int, angles) -> float:
    """The same recursion with exact posteriors (no prior grid), for small N."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if (2 * len(angles)) ** n > TREE_BUDGET:
        raise ResourceError("exact recursion too large; reduce N or the angle grid")

    def value_at(stage):
        if stage == n:
            return _terminal

        def fn(prior):
            shape = np.shape(prior)
            flat = np.ravel(prior)
            _, v = _backup(pair, value_at(stage + 1), flat, angles, refine=False)
            return v.reshape(shape)
        return fn

    return float(1.0 - value_at(0)(np.array([0.5]))[0])


def brute_force_adaptive(pair: StatePair, n: int, angles) -> float:
    """Error of the best adaptive strategy restricted to ``angles``, by
    maximizing over the full outcome tree with joint probabilities."""
    if n > 3:
        raise ResourceError("exhaustive tree limited to N <= 3")
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if (2 * len(angles)) ** n > TREE_BUDGET:
        raise ResourceError("exhaustive tree too large for this angle grid")
    p0, p1 = outcome_probs(pair, angles)
    p0, p1 = np.atleast_1d(p0), np.atleast_1d(p1)

    def best(w0, w1, left):
        # w0, w1: joint probabilities of the outcomes so far and each state
        if left == 0:
            return np.maximum(w0, w1)
        plus = best(w0[..., None] * p0, w1[..., None] * p1, left - 1)
        minus = best(w0[..., None] * (1 - p0), w1[..., None] * (1 - p1), left - 1)
        return np.max(plus + minus, axis=-1)

    success = best(np.array(0.5), np.array(0.5), n)
    return float(1.0 - success)


@dataclass(frozen=True)
class RolloutStats:
    success: float
    stderr: float
    trials: int


def simulate(policy: Policy, pair: StatePair, which_true: int, trials: int, seed: int,
             chunk: int = 200_000) -> RolloutStats:
    """Monte Carlo success rate of ``policy`` when the copies are in state ``which_true``."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=seed))
    n = policy.n_copies
    wins = 0
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        u = rng.random((size, n))
        prior = np.full(size, 0.5)
        for copy in range(1, n + 1):
            theta = policy.angle(copy, prior)
            p0, p1 = outcome_probs(pair, theta)
            p_true = p0 if which_true == 0 else p1
            plus = u[:, copy - 1] < p_true
            q0 = np.where(plus, p0, 1 - p0)
            q1 = np.where(plus, p1, 1 - p1)
            marginal = q0 * prior + q1 * (1 - prior)
            prior = np.where(marginal > 0, q0 * prior / np.where(marginal > 0, marginal, 1.0), prior)
        guess = np.where(prior >= 0.5, 0, 1)
        wins += int(np.sum(guess == which_true))
        done += size
    rate = wins / trials
    return RolloutStats(rate, math.sqrt(max(rate * (1 - rate), 0.0) / trials), trials)


def write_tables(path, result: AdaptiveResult) -> None:
    """Columnar text dump: stage, node prior, S*_stage, angle for copy stage+1.

    The last stage has no measurement left and its angle column is empty.
    """
    nodes = result.grid.nodes
    values = result.values.values
    angles = result.policy.angles
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(["stage", "prior", "value", "angle"])
        for stage in range(values.shape[0]):
            for i, prior in enumerate(nodes):
                angle = repr(float(angles[stage, i])) if stage < angles.shape[0] else ""
                writer.writerow([stage, repr(float(prior)), repr(float(values[stage, i])), angle])


def read_tables(path) -> tuple[ValueTable, Policy]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh, delimiter="\t"))
    n_stage = max(int(r["stage"]) for r in rows) + 1
    points = len(rows) // n_stage
    values = np.array([float(r["value"]) for r in rows]).reshape(n_stage, points)
    angles = np.array([float(r["angle"]) for r in rows if r["angle"]]).reshape(n_stage - 1, points)
    return ValueTable(values), Policy(angles, PriorGrid(points))
