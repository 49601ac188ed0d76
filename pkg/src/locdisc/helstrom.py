"""Optimal collective (Helstrom) error probability for N copies."""
import numpy as np

from .blocks import DENSE_MAX_N, degeneracy, sigma_block, sigma_dense, spins
from .errors import DomainError, ResourceError
from .qubit import StatePair


def trace_norm(sym: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(sym))))


def collective_error(pair: StatePair, n: int) -> float:
    """Helstrom error for rho0^{(x)N} vs rho1^{(x)N} at equal priors, block by block."""
    if n < 1:
        raise DomainError(f"N={n} must be >= 1")
    if pair.identical:
        return 0.5
    dist = 0.0
    for tj in spins(n):
        diff = sigma_block(pair, 0, n, tj) - sigma_block(pair, 1, n, tj)
        dist += degeneracy(n, tj) * trace_norm(diff)
    return float(np.clip(0.5 * (1 - 0.5 * dist), 0.0, 0.5))


def collective_error_dense(pair: StatePair, n: int) -> float:
    if n > DENSE_MAX_N:
        raise ResourceError(f"dense Helstrom limited to N <= {DENSE_MAX_N}")
    diff = sigma_dense(pair, 0, n) - sigma_dense(pair, 1, n)
    return float(np.clip(0.5 * (1 - 0.5 * trace_norm(diff)), 0.0, 0.5))
