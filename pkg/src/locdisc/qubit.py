"""Single-qubit (rebit) states in the plane of their two Bloch vectors.

Angles are polar angles measured from the bisector of the two Bloch vectors:
state 0 sits at ``+theta/2``, state 1 at ``-theta/2``.  With that choice both
density matrices are real, which is all the block machinery needs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._optim import golden_min
from .errors import DomainError


@dataclass(frozen=True)
class StatePair:
    r0: float
    r1: float
    theta: float
    rho0: np.ndarray = field(repr=False, compare=False)
    rho1: np.ndarray = field(repr=False, compare=False)

    def rho(self, which: int) -> np.ndarray:
        return self.rho0 if which == 0 else self.rho1

    def purity(self, which: int) -> float:
        return self.r0 if which == 0 else self.r1

    @property
    def identical(self) -> bool:
        return bool(np.array_equal(self.rho0, self.rho1))

    def swapped(self) -> "StatePair":
        """The same two states with labels exchanged (theta -> -theta mirror)."""
        return make_pair(self.r1, self.r0, self.theta)


def bloch_rho(r: float, theta: float, which: int) -> np.ndarray:
    c = r * math.cos(theta / 2)
    s = (-1) ** which * r * math.sin(theta / 2)
    rho = np.array([[(1 + c) / 2, s / 2], [s / 2, (1 - c) / 2]])
    rho.setflags(write=False)
    return rho


def make_pair(r0: float, r1: float, theta: float) -> StatePair:
    """Build the pair of rebit states with purities ``r0, r1`` at relative angle ``theta``."""
    for name, value in (("r0", r0), ("r1", r1)):
        if not (0.0 <= value <= 1.0) or math.isnan(value):
            raise DomainError(f"{name}={value!r} outside [0, 1]")
    if not (0.0 <= theta <= math.pi) or math.isnan(theta):
        raise DomainError(f"theta={theta!r} outside [0, pi]")
    r0, r1, theta = float(r0), float(r1), float(theta)
    return StatePair(r0, r1, theta, bloch_rho(r0, theta, 0), bloch_rho(r1, theta, 1))


def fidelity(pair: StatePair) -> float:
    """Uhlmann fidelity (tr|sqrt(rho0) sqrt(rho1)|)^2, 2x2 closed form."""
    r0, r1 = pair.r0, pair.r1
    overlap = float(np.sum(pair.rho0 * pair.rho1))
    dets = (1 - r0 * r0) * (1 - r1 * r1) / 16
    f = overlap + 2 * math.sqrt(max(dets, 0.0))
    return min(max(f, 0.0), 1.0)


def _spectrum(r: float) -> tuple[float, float]:
    return (1 + r) / 2, (1 - r) / 2


def _power(lam: float, s):
    # rho^0 is the support projector, so zero eigenvalues stay zero for every s
    if lam <= 0.0:
        return np.zeros_like(np.asarray(s, dtype=float))
    return lam ** np.asarray(s, dtype=float)


def chernoff_trace(pair: StatePair, s):
    """tr(rho0^s rho1^(1-s)) for scalar or array ``s``."""
    a0, b0 = _spectrum(pair.r0)
    a1, b1 = _spectrum(pair.r1)
    # Bloch vectors are theta apart: eigenprojector overlaps are cos^2 / sin^2 of theta/2
    c2 = math.cos(pair.theta / 2) ** 2
    s2 = 1.0 - c2
    s = np.asarray(s, dtype=float)
    t = 1.0 - s
    # 'same' pairs the +/+ and -/- eigenvectors, 'cross' the +/- ones
    same = _power(a0, s) * _power(a1, t) + _power(b0, s) * _power(b1, t)
    cross = _power(a0, s) * _power(b1, t) + _power(b0, s) * _power(a1, t)
    return c2 * same + s2 * cross


def quantum_chernoff_exponent(pair: StatePair) -> float:
    """-log min_s tr(rho0^s rho1^(1-s)), s in [0, 1]."""
    if pair.identical:
        return 0.0
    s, q = golden_min(lambda s: chernoff_trace(pair, s), 0.0, 1.0, tol=1e-12)
    if q <= 0.0:
        return math.inf
    return max(-math.log(q), 0.0)


def fidelity_exponent_bounds(pair: StatePair) -> tuple[float, float]:
    """(-log F / 2, -log F): the bracket for the collective error exponent.

    Orthogonal pure states (F = 0) give ``(inf, inf)``.
    """
    f = fidelity(pair)
    if f <= 0.0:
        return math.inf, math.inf
    lower = -0.5 * math.log(f)
    return lower, 2 * lower
