"""Parameter sweeps and derived quantities: error-rate tables versus N and r,
the collective/PPT rate gap, asymptotic rate fits and the copies ratio."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .adaptive import PriorGrid, dp_solve
from .errors import DomainError, ResourceError
from .helstrom import collective_error
from .local import repeated_error_opt
from .qubit import StatePair, make_pair
from .sdp import default_tol, ppt_error

STRATEGIES = ("collective", "ppt", "adaptive", "repeated")
MAX_N = 40
WORKERS_ENV = "LOCDISC_WORKERS"
ORDER_TOL = 1e-5


@dataclass(frozen=True)
class SweepSpec:
    r0: float = 0.8
    r1: float = 0.8
    theta: float = math.pi / 2
    n_values: tuple[int, ...] = (1, 2, 3, 4, 5)
    strategies: tuple[str, ...] = STRATEGIES
    tol: float | None = None
    grid_points: int = 20000
    seed: int = 0
    allow_large: bool = False

    def __post_init__(self):
        if not self.strategies:
            raise DomainError("strategy set is empty")
        bad = set(self.strategies) - set(STRATEGIES)
        if bad:
            raise DomainError(f"unknown strategies {sorted(bad)}")
        if not self.n_values or min(self.n_values) < 1:
            raise DomainError("N values must be >= 1")
        heavy = {"ppt", "adaptive"} & set(self.strategies)
        if heavy and max(self.n_values) > MAX_N and not self.allow_large:
            raise ResourceError(f"N > {MAX_N} refused for {sorted(heavy)} without allow_large")
        make_pair(self.r0, self.r1, self.theta)

    @property
    def pair(self) -> StatePair:
        return make_pair(self.r0, self.r1, self.theta)


def _cell(args) -> tuple[int, str, float, str]:
    """One (N, strategy) evaluation; failures are reported, not raised."""
    r0, r1, theta, n, strategy, tol, grid_points = args
    pair = make_pair(r0, r1, theta)
    try:
        if strategy == "collective":
            return n, strategy, collective_error(pair, n), "ok"
        if strategy == "ppt":
            res = ppt_error(pair, n, tol)
            return n, strategy, res.error, res.status
        if strategy == "repeated":
            return n, strategy, repeated_error_opt(pair, n)[0], "ok"
        res = dp_solve(pair, n, PriorGrid(grid_points))
        return n, strategy, res.error, res.status
    except Exception as exc:  # recorded in-row so the sweep keeps going
        return n, strategy, math.nan, f"error: {type(exc).__name__}: {exc}"


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _run_cells(tasks):
    workers = _workers()
    if workers == 1 or len(tasks) == 1:
        results = [_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell, tasks))
    return sorted(results, key=lambda r: (r[0], STRATEGIES.index(r[1])))


def _ordering_flags(row: dict, strategies) -> str:
    present = [s for s in STRATEGIES if s in strategies and not math.isnan(row[s])]
    flags = []
    for lo, hi in zip(present, present[1:]):
        if row[lo] > row[hi] + ORDER_TOL:
            flags.append(f"{lo}>{hi}")
    return ";".join(flags)


def sweep_n(spec: SweepSpec) -> list[dict]:
    """Error probability per N (rows) and strategy (columns)."""
    tasks = [(spec.r0, spec.r1, spec.theta, n, s, spec.tol, spec.grid_points)
             for n in sorted(set(spec.n_values)) for s in spec.strategies]
    rows: dict[int, dict] = {}
    for n, strategy, pe, status in _run_cells(tasks):
        row = rows.setdefault(n, {"N": n})
        row[strategy] = pe
        row[f"{strategy}_status"] = status
    out = []
    for n in sorted(rows):
        row = rows[n]
        row["flags"] = _ordering_flags(row, spec.strategies)
        out.append(row)
    return out


def rate(pe: float, n: int) -> float:
    if pe <= 0.0:
        return math.inf
    return -math.log(pe) / n


def sweep_r(theta: float, n: int, r_list, strategies=STRATEGIES, tol=None,
            grid_points: int = 20000) -> list[dict]:
    """Error rate C = -log(P_e)/N per purity r = r0 = r1 and strategy."""
    tasks = [(r, r, theta, n, s, tol, grid_points) for r in r_list for s in strategies]
    results = _run_cells_keyed(tasks)
    out = []
    for r in r_list:
        row = {"r": float(r)}
        for s in strategies:
            pe, status = results[(r, s)]
            row[s] = rate(pe, n) if not math.isnan(pe) else math.nan
            row[f"{s}_status"] = status
        row["flags"] = _ordering_flags({k: -v if k in STRATEGIES else v for k, v in row.items()},
                                       strategies)
        out.append(row)
    return out


def _run_cells_keyed(tasks):
    workers = _workers()
    if workers == 1:
        results = [_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell, tasks))
    return {(t[0], t[4]): (res[2], res[3]) for t, res in zip(tasks, results)}


@dataclass(frozen=True)
class GapResult:
    delta: float
    p_collective: float
    p_ppt: float
    flagged: bool
    status: str


def gap(pair: StatePair, n: int, tol: float | None = None) -> GapResult:
    """Rate gap -(1/N) log(P_col / P_ppt) between collective and PPT-bound strategies."""
    p_col = collective_error(pair, n)
    res = ppt_error(pair, n, tol)
    if p_col >= res.error:
        # PPT can only be worse than collective; small inversions are solver slack
        eps = default_tol(n) if tol is None else tol
        flagged = p_col - res.error > eps
        return GapResult(0.0, p_col, res.error, flagged, res.status)
    return GapResult(-math.log(p_col / res.error) / n, p_col, res.error, False, res.status)


@dataclass(frozen=True)
class RateFit:
    c0: float
    c1: float
    c2: float
    residual: float
    window: tuple[int, int]


def fit_rate(rows, window: tuple[int, int] | None = None) -> RateFit:
    """Least-squares fit of C(N) = -log(P_e)/N to C0 + C1 log(N)/N + C2/N."""
    pts = [(int(n), float(pe)) for n, pe in rows
           if window is None or window[0] <= n <= window[1]]
    if len(pts) < 3:
        raise DomainError(f"need at least 3 rows in the window, got {len(pts)}")
    ns = np.array([p[0] for p in pts], dtype=float)
    c = np.array([rate(p[1], int(p[0])) for p in pts])
    design = np.stack([np.ones_like(ns), np.log(ns) / ns, 1.0 / ns], axis=1)
    if np.linalg.matrix_rank(design) < 3:
        raise DomainError("degenerate window: design matrix is singular")
    coef, *_ = np.linalg.lstsq(design, c, rcond=None)
    resid = float(np.linalg.norm(design @ coef - c))
    win = (int(ns.min()), int(ns.max()))
    return RateFit(float(coef[0]), float(coef[1]), float(coef[2]), resid, win)


@dataclass(frozen=True)
class CopiesRatio:
    f: float
    c_collective: float
    c_ppt: float


def copies_ratio(pair: StatePair, n: int, tol: float | None = None) -> CopiesRatio:
    """f = C_col / C_ppt: how many more copies the best LOCC protocol needs."""
    p_ppt = ppt_error(pair, n, tol).error
    if p_ppt >= 0.5:
        raise DomainError("PPT error is 1/2: rates are degenerate")
    c_col = rate(collective_error(pair, n), n)
    c_ppt = rate(p_ppt, n)
    if c_ppt <= 0.0 or not math.isfinite(c_col):
        raise DomainError("degenerate rates")
    return CopiesRatio(c_col / c_ppt, c_col, c_ppt)


# ---------------------------------------------------------------- emission

def to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    fields = list(rows[0].keys())
    for row in rows[1:]:
        fields += [k for k in row if k not in fields]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(v) for k, v in row.items()})
    return buf.getvalue()


def _fmt(v):
    # repr gives the shortest decimal that round-trips
    if isinstance(v, float):
        return repr(v)
    return v


def to_json(rows: list[dict], spec: dict, wall_time: float) -> str:
    meta = {
        "spec": spec,
        "versions": {"locdisc": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
        "tolerances": {"sdp_tol": spec.get("tol"), "order_tol": ORDER_TOL},
        "wall_time_s": wall_time,
    }
    clean = [{k: (None if isinstance(v, float) and not math.isfinite(v) else v)
              for k, v in row.items()} for row in rows]
    return json.dumps({"metadata": meta, "records": clean}, indent=2)


def spec_dict(spec) -> dict:
    d = asdict(spec)
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
