"""PPT-constrained lower bound on the LOCC error via a log-barrier
interior-point method over the PT-invariant block parametrization.

Because the measurement operator can be taken PT invariant, the PPT
constraint is automatic and only ``0 <= E^(j) <= 1`` remains, one small
block per total spin j.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .blocks import ParamVector, degeneracy, m_values, mmap, n_params, sigma_block, spins
from .errors import DomainError
from .qubit import StatePair

log = logging.getLogger(__name__)

MU0 = 1.0
MU_FACTOR = 0.2
MAX_NEWTON = 500
INNER_TOL = 1e-10


def default_tol(n: int) -> float:
    return 1e-7 if n > 25 else 1e-8


@dataclass(frozen=True)
class SDPInstance:
    n_copies: int
    objective: np.ndarray = field(repr=False)
    block_maps: dict[int, np.ndarray] = field(repr=False)
    degeneracies: dict[int, int] = field(repr=False)
    # sum_j n_j ||sigma0^(j) - sigma1^(j)||_1, a bound on |objective| over the feasible set
    objective_bound: float = 0.0
    # sigma0^(j) - sigma1^(j)
    objective_blocks: dict[int, np.ndarray] = field(default_factory=dict, repr=False)
    # P_e = offset * (1 + value)
    constant_offset: float = 0.5

    def block(self, x: np.ndarray, two_j: int) -> np.ndarray:
        e = self.block_maps[two_j] @ x
        return (e + e.T) / 2


@dataclass
class SDPSolution:
    value: float
    params: ParamVector
    gap: float
    iterations: int
    status: str
    history: list[float] = field(default_factory=list, repr=False)
    blocks: list[np.ndarray] = field(default_factory=list, repr=False)


def build_ppt_instance(pair: StatePair, n: int) -> SDPInstance:
    if n < 1:
        raise DomainError(f"N={n} must be >= 1")
    maps, degs, diffs = {}, {}, {}
    c = np.zeros(n_params(n))
    bound = 0.0
    for tj in spins(n):
        m = mmap(n, tj)
        maps[tj] = m
        degs[tj] = degeneracy(n, tj)
        diff = sigma_block(pair, 0, n, tj) - sigma_block(pair, 1, n, tj)
        diffs[tj] = diff
        c += degs[tj] * np.tensordot(diff, m, axes=([0, 1], [0, 1]))
        bound += degs[tj] * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
    return SDPInstance(n, c, maps, degs, bound, diffs)


def _orthonormal_coordinates(inst: SDPInstance):
    """Re-express the block maps in coordinates with orthonormal columns.

    A parameter with ``q + r = s`` only feeds the anti-diagonal ``m + m' = N - s``
    of each block, so the map splits by ``s`` and a QR factorization per slice
    gives ``x_s = R_s^-1 y_s`` without destroying sparsity. Newton's method is
    affine invariant, so this changes only the conditioning.
    """
    n = inst.n_copies
    p = n_params(n)
    s_of = np.array([q + r for q in range(n + 1) for r in range(q + 1)])
    new_maps = {tj: np.zeros_like(m) for tj, m in inst.block_maps.items()}
    slices = []
    for s in range(2 * n + 1):
        cols = np.flatnonzero(s_of == s)
        rows, stack = [], []
        for tj, m in inst.block_maps.items():
            ms = np.array(m_values(tj))
            a, b = np.nonzero(ms[:, None] + ms[None, :] == 2 * (n - s))
            rows.append((tj, a, b))
            stack.append(m[a, b][:, cols])
        stack = np.concatenate(stack)
        q_mat, r_mat = np.linalg.qr(stack)
        if stack.shape[0] < len(cols) or np.min(np.abs(np.diag(r_mat))) == 0.0:
            raise np.linalg.LinAlgError(f"block map not injective on slice s={s}")
        offset = 0
        for tj, a, b in rows:
            new_maps[tj][a[:, None], b[:, None], cols[None, :]] = q_mat[offset:offset + len(a)]
            offset += len(a)
        slices.append((cols, r_mat))
    return new_maps, slices


def _to_orthonormal(x, slices):
    y = np.empty_like(x)
    for cols, r in slices:
        y[cols] = r @ x[cols]
    return y


def _from_orthonormal(y, slices):
    x = np.empty_like(y)
    for cols, r in slices:
        x[cols] = sla.solve_triangular(r, y[cols])
    return x


class _Barrier:
    """-(log det E + log det (I - E)) summed over blocks, with derivatives."""

    def __init__(self, maps: dict[int, np.ndarray]):
        self.parts = []
        for tj, m in maps.items():
            d = tj + 1
            flat = m.reshape(d * d, -1)
            support = np.flatnonzero(np.any(flat != 0.0, axis=0))
            a = np.ascontiguousarray(np.moveaxis(m[:, :, support], 2, 0))
            a = (a + np.swapaxes(a, 1, 2)) / 2
            self.parts.append((d, support, a))
        self.nu = sum(2 * d for d, _, _ in self.parts)

    def blocks(self, x):
        return [np.tensordot(x[support], a, axes=1) for d, support, a in self.parts]

    def _chol(self, x):
        out = []
        for (d, _, _), e in zip(self.parts, self.blocks(x)):
            try:
                out.append((np.linalg.cholesky(e), np.linalg.cholesky(np.eye(d) - e)))
            except np.linalg.LinAlgError:
                return None
        return out

    def value(self, x):
        chols = self._chol(x)
        if chols is None:
            return None
        return -sum(2 * np.sum(np.log(np.diag(le))) + 2 * np.sum(np.log(np.diag(lf)))
                    for le, lf in chols)

    def derivatives(self, x):
        chols = self._chol(x)
        if chols is None:
            return None
        p = len(x)
        val = 0.0
        grad = np.zeros(p)
        hess = np.zeros((p, p))
        for (d, support, a), (le, lf) in zip(self.parts, chols):
            val -= 2 * np.sum(np.log(np.diag(le))) + 2 * np.sum(np.log(np.diag(lf)))
            iu = np.triu_indices(d)
            w = np.where(iu[0] == iu[1], 1.0, math.sqrt(2.0))
            k = len(support)
            feats = []
            for chol, sign in ((le, -1.0), (lf, 1.0)):
                linv_t = sla.solve_triangular(chol, np.eye(d), lower=True).T
                # B_p = L^-1 A_p L^-T as two flat products; A_p and B_p are symmetric
                half = (a.reshape(k * d, d) @ linv_t).reshape(k, d, d)
                b = (np.ascontiguousarray(np.swapaxes(half, 1, 2)).reshape(k * d, d) @ linv_t)
                b = b.reshape(k, d, d)
                grad[support] += sign * np.trace(b, axis1=1, axis2=2)
                feats.append(b[:, iu[0], iu[1]] * w)
            f = np.concatenate(feats, axis=1)
            # upper triangle of f f^T only; mirrored once at the end
            gram = sla.blas.dsyrk(1.0, f)
            if k == p:
                hess += gram
            else:
                hess[np.ix_(support, support)] += gram
        hess = np.triu(hess) + np.triu(hess, 1).T
        return val, grad, hess


def _newton_direction(hess, g):
    try:
        cf = sla.cho_factor(hess)
        return -sla.cho_solve(cf, g)
    except np.linalg.LinAlgError:
        return -np.linalg.lstsq(hess, g, rcond=None)[0]


def solve(inst: SDPInstance, tol: float | None = None, max_newton: int = MAX_NEWTON) -> SDPSolution:
    """Minimize ``c . x`` subject to ``0 <= E^(j)(x) <= 1`` for every j.

    ``tol`` bounds the final suboptimality in objective units (twice the
    error-probability units).
    """
    n = inst.n_copies
    tol = default_tol(n) if tol is None else tol
    if tol < 1e-10:
        raise DomainError(f"tol={tol} below the supported 1e-10")
    x0 = ParamVector.identity(n, 0.5).values
    # the objective is bounded by this over the feasible set; normalizing by it
    # (rather than by max|c|, which grows combinatorially with N) keeps the
    # barrier gap meaningful in probability units
    scale = inst.objective_bound
    if scale == 0.0 or not np.any(inst.objective):
        return SDPSolution(0.0, ParamVector(n, x0.copy()), 0.0, 0, "converged", [0.0])

    maps, slices = _orthonormal_coordinates(inst)
    barrier = _Barrier(maps)
    c = np.zeros(len(x0))
    for tj, m in maps.items():
        diff_j = np.tensordot(inst.objective_blocks[tj], m, axes=([0, 1], [0, 1]))
        c += inst.degeneracies[tj] * diff_j
    cs = c / scale
    y = _to_orthonormal(x0, slices)

    mu = MU0
    steps = 0
    history = []
    status = "converged"
    while True:
        t = 1.0 / mu
        while True:
            if steps >= max_newton:
                status = "max-iterations"
                break
            derivs = barrier.derivatives(y)
            if derivs is None:
                status = "numerical-failure"
                break
            bval, bgrad, hess = derivs
            g = t * cs + bgrad
            dy = _newton_direction(hess, g)
            dec = -(g @ dy)
            steps += 1
            if dec / 2 <= INNER_TOL:
                break
            f0 = t * (cs @ y) + bval
            # rounding floor on phi differences, large t makes f0 big
            slack = 64 * np.finfo(float).eps * (abs(t * (cs @ y)) + abs(bval))
            step = 1.0
            while step > 1e-12:
                f1 = barrier.value(y + step * dy)
                if f1 is not None and t * (cs @ (y + step * dy)) + f1 <= f0 - 0.25 * step * dec + slack:
                    break
                step /= 2
            else:
                status = "numerical-failure"
                break
            y = y + step * dy
            if step * dec < slack:
                break
        history.append(float(scale * (cs @ y)))
        if status != "converged" or scale * mu * barrier.nu < tol:
            break
        mu *= MU_FACTOR
    gap = scale * mu * barrier.nu
    log.debug("N=%d sdp: %d newton steps, status %s", n, steps, status)
    x = _from_orthonormal(y, slices)
    return SDPSolution(float(scale * (cs @ y)), ParamVector(n, x), gap, steps, status, history,
                       [ (b + b.T) / 2 for b in barrier.blocks(y)])


@dataclass(frozen=True)
class PPTResult:
    error: float
    status: str
    solution: SDPSolution = field(repr=False)


def ppt_error(pair: StatePair, n: int, tol: float | None = None) -> PPTResult:
    """Lower bound on the LOCC error from the PPT relaxation."""
    inst = build_ppt_instance(pair, n)
    sol = solve(inst, tol)
    pe = inst.constant_offset * (1 + sol.value)
    return PPTResult(float(min(max(pe, 0.0), 0.5)), sol.status, sol)
