"""Dense-oracle suite: block-based quantities against explicit 2^N matrices."""
from __future__ import annotations

import numpy as np

from .blocks import (assemble_block, project_block, random_params, reconstruct_dense,
                     sigma_block, sigma_dense, spins)
from .helstrom import collective_error, collective_error_dense
from .qubit import make_pair

ORACLE_TOL = 1e-10


def random_pair(rng: np.random.Generator):
    return make_pair(rng.uniform(0, 0.999), rng.uniform(0, 0.999), rng.uniform(0, np.pi))


def run_dense_suite(n_max: int = 6, samples: int = 50, seed: int = 0) -> list[dict]:
    """Worst deviation per check and N over `samples` random state pairs."""
    rng = np.random.default_rng(seed)
    pairs = [random_pair(rng) for _ in range(samples)]
    rows = []
    for n in range(1, n_max + 1):
        helstrom = max(abs(collective_error(p, n) - collective_error_dense(p, n)) for p in pairs)
        sigma = 0.0
        for p in pairs:
            for which in (0, 1):
                dense = sigma_dense(p, which, n)
                for tj in spins(n):
                    sigma = max(sigma, np.max(np.abs(
                        sigma_block(p, which, n, tj) - project_block(dense, n, tj))))
        params = 0.0
        for _ in range(samples):
            x = random_params(n, rng)
            dense = reconstruct_dense(x)
            for tj in spins(n):
                params = max(params, np.max(np.abs(
                    assemble_block(x, tj) - project_block(dense, n, tj))))
        for check, dev in (("helstrom", helstrom), ("sigma_block", sigma),
                           ("assemble_block", params)):
            rows.append({"N": n, "check": check, "max_dev": float(dev),
                         "pass": bool(dev <= ORACLE_TOL)})
    return rows
