"""Fixed ("repeated") local strategy: the same projective qubit measurement
on every copy, followed by the Bayes decision on the outcome count.

The measurement Bloch vector lies in the plane of the states at polar angle
``Theta`` from their bisector (``Theta = pi/2`` is along r0 - r1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

from ._optim import golden_max, golden_min, grid_refine_max
from .errors import DomainError
from .qubit import StatePair, make_pair

N_GRID = 181
ANGLE_TOL = 1e-4


@dataclass(frozen=True)
class Measurement1D:
    theta_meas: float
    p0: float
    p1: float


def outcome_probs(pair: StatePair, theta_meas):
    """Probabilities of the '+' outcome under each state (broadcasts over angles)."""
    half = pair.theta / 2
    p0 = (1 + pair.r0 * np.cos(theta_meas - half)) / 2
    p1 = (1 + pair.r1 * np.cos(theta_meas + half)) / 2
    if np.ndim(p0) == 0:
        return float(p0), float(p1)
    return p0, p1


def measurement(pair: StatePair, theta_meas: float) -> Measurement1D:
    if not 0.0 <= theta_meas <= math.pi:
        raise DomainError(f"theta_meas={theta_meas!r} outside [0, pi]")
    return Measurement1D(theta_meas, *outcome_probs(pair, theta_meas))


def _log_binomial_terms(n: int, p):
    counts = np.arange(n + 1)
    p = np.asarray(p, dtype=float)[..., None]
    logc = gammaln(n + 1) - gammaln(counts + 1) - gammaln(n - counts + 1)
    return logc + xlogy(counts, p) + xlog1py(n - counts, -p)


def _repeated_error_vec(pair: StatePair, n: int, theta_meas) -> np.ndarray:
    p0, p1 = outcome_probs(pair, np.asarray(theta_meas, dtype=float))
    l0 = _log_binomial_terms(n, p0)
    l1 = _log_binomial_terms(n, p1)
    return 0.5 * np.sum(np.exp(np.minimum(l0, l1)), axis=-1)


def repeated_error(pair: StatePair, n: int, theta_meas: float) -> float:
    """Error of measuring every copy at ``theta_meas`` and deciding by Bayes on counts."""
    if n < 1:
        raise DomainError(f"N={n} must be >= 1")
    if pair.identical:
        return 0.5
    return float(min(_repeated_error_vec(pair, n, theta_meas), 0.5))


def _canonical_angle(pair: StatePair, theta: float) -> float:
    # equal purities: Theta and pi - Theta are the same strategy with outcomes relabelled
    if pair.r0 == pair.r1 and theta > math.pi / 2:
        return math.pi - theta
    return theta


def repeated_error_opt(pair: StatePair, n: int) -> tuple[float, float]:
    """Best fixed measurement for N copies: ``(P_e, Theta*)``.

    When the states are indistinguishable every angle is optimal and the
    returned angle is just the first grid point attaining the minimum.
    """
    if n < 1:
        raise DomainError(f"N={n} must be >= 1")
    if pair.identical:
        return 0.5, 0.0
    theta, neg = grid_refine_max(lambda t: -_repeated_error_vec(pair, n, t),
                                 0.0, math.pi, n_grid=N_GRID, n_starts=3)
    return float(min(-neg, 0.5)), _canonical_angle(pair, theta)


def bayes_threshold(pair: StatePair, n: int, theta_meas: float) -> dict:
    """Which counts of '+' outcomes the Bayes rule assigns to state 0.

    Returns the decision set and its classification: ``"unanimity"`` when only
    an extreme count (all '+' or all '-') is assigned to one of the states,
    ``"majority"`` otherwise.
    """
    p0, p1 = outcome_probs(pair, theta_meas)
    l0 = _log_binomial_terms(n, p0)
    l1 = _log_binomial_terms(n, p1)
    to_zero = [int(k) for k in np.flatnonzero(l0 > l1)]
    to_one = [k for k in range(n + 1) if k not in to_zero]
    smaller = min(len(to_zero), len(to_one))
    extreme = {0, n}
    if n > 1 and smaller == 1 and (set(to_zero) <= extreme or set(to_one) <= extreme):
        rule = "unanimity"
    else:
        rule = "majority"
    return {"to_state0": to_zero, "to_state1": to_one, "rule": rule}


def _classical_trace(pair: StatePair, theta_meas, s):
    p0, p1 = outcome_probs(pair, theta_meas)
    s = np.asarray(s, dtype=float)
    t = 1.0 - s
    with np.errstate(divide="ignore", invalid="ignore"):
        plus = np.where((p0 > 0) & (p1 > 0), np.power(p0, s) * np.power(p1, t),
                        np.where(s == 0, p1 * (p0 > 0), np.where(s == 1, p0 * (p1 > 0), 0.0)))
        q0, q1 = 1 - p0, 1 - p1
        minus = np.where((q0 > 0) & (q1 > 0), np.power(q0, s) * np.power(q1, t),
                         np.where(s == 0, q1 * (q0 > 0), np.where(s == 1, q0 * (q1 > 0), 0.0)))
    return plus + minus


def _classical_exponent_vec(pair: StatePair, theta_meas) -> np.ndarray:
    theta_meas = np.asarray(theta_meas, dtype=float)
    lo = np.zeros_like(theta_meas)
    hi = np.ones_like(theta_meas)
    _, q = golden_min(lambda s: _classical_trace(pair, theta_meas, s), lo, hi, tol=1e-12)
    q = np.asarray(q)
    with np.errstate(divide="ignore"):
        return np.maximum(-np.log(q), 0.0)


def classical_chernoff_exponent(pair: StatePair, theta_meas: float) -> float:
    """Chernoff exponent of the two outcome distributions of one measurement."""
    p0, p1 = outcome_probs(pair, theta_meas)
    if p0 == p1:
        return 0.0
    return float(_classical_exponent_vec(pair, theta_meas))


def repeated_exponent_opt(pair: StatePair) -> tuple[float, float]:
    """Best classical Chernoff exponent over fixed measurements: ``(C0_rep, Theta*)``."""
    if pair.identical:
        return 0.0, 0.0
    theta, c = grid_refine_max(lambda t: _classical_exponent_vec(pair, t),
                               0.0, math.pi, n_grid=N_GRID, n_starts=3)
    # the exponent is flat to ~1e-16 around a maximum; prefer the symmetric
    # angle when it is as good as the refined one
    if pair.r0 == pair.r1:
        c_mid = float(_classical_exponent_vec(pair, math.pi / 2))
        if c_mid >= c - 1e-15:
            theta, c = math.pi / 2, max(c, c_mid)
    return float(c), _canonical_angle(pair, theta)


@dataclass(frozen=True)
class CriticalPurity:
    value: float
    found: bool
    bracket: tuple[float, float]


def critical_purity(theta: float, tol: float = 1e-7, angle_tol: float = ANGLE_TOL) -> CriticalPurity:
    """Smallest purity r (r0 = r1 = r) at which the optimal fixed measurement
    leaves Theta = pi/2 by more than ``angle_tol``, located by bisection."""
    if not 0.0 < theta < math.pi:
        raise DomainError(f"theta={theta!r} must lie in (0, pi)")

    def departed(r: float) -> bool:
        _, t = repeated_exponent_opt(make_pair(r, r, theta))
        return abs(t - math.pi / 2) > angle_tol

    lo, hi = 0.0, 1.0 - 1e-12
    if not departed(hi):
        return CriticalPurity(math.nan, False, (lo, hi))
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if departed(mid):
            hi = mid
        else:
            lo = mid
    return CriticalPurity((lo + hi) / 2, True, (lo, hi))
