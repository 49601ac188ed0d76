"""Vectorized golden-section search.

All brackets are searched in lockstep so thousands of independent
one-dimensional problems (one per prior node, say) cost one numpy call per
iteration.
"""
import numpy as np

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, a, b, tol=1e-12, max_iter=200):
    """Maximize a unimodal ``f`` on ``[a, b]`` elementwise.

    ``f`` must accept an array of abscissae shaped like ``a`` and return
    values of the same shape. Returns ``(x_best, f_best)``; the endpoints are
    included among the candidates so a monotone ``f`` returns its boundary.
    """
    a = np.array(a, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    fa, fb = f(a), f(b)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if np.all(b - a <= tol):
            break
        left = fc >= fd
        # left: keep [a, d]; otherwise keep [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_d = np.where(left, c, a + _INVPHI * (b - a))
        new_c = np.where(left, b - _INVPHI * (b - a), d)
        fd_keep = np.where(left, fc, np.nan)
        fc_keep = np.where(left, np.nan, fd)
        c, d = new_c, new_d
        # one fresh evaluation per lane, done for both sides in a single call
        fresh_x = np.where(left, c, d)
        fresh = f(fresh_x)
        fc = np.where(left, fresh, fc_keep)
        fd = np.where(left, fd_keep, fresh)
    xs = np.stack([a, c, d, b])
    fs = np.stack([fa, fc, fd, fb])
    best = np.argmax(fs, axis=0)
    x_best = np.take_along_axis(xs, best[None], axis=0)[0]
    f_best = np.take_along_axis(fs, best[None], axis=0)[0]
    if x_best.ndim == 0:
        return float(x_best), float(f_best)
    return x_best, f_best


def golden_min(f, a, b, tol=1e-12, max_iter=200):
    x, fx = golden_max(lambda t: -f(t), a, b, tol=tol, max_iter=max_iter)
    return x, -fx


def grid_refine_max(f, lo, hi, n_grid=181, n_starts=3, tol=1e-12):
    """Scalar global maximization: coarse grid, then golden section around
    the ``n_starts`` best grid points. Returns ``(x_best, f_best)``."""
    xs = np.linspace(lo, hi, n_grid)
    fs = np.asarray(f(xs), dtype=float)
    order = np.argsort(-fs, kind="stable")
    best_x, best_f = xs[order[0]], fs[order[0]]
    step = xs[1] - xs[0]
    seen = set()
    for i in order:
        if len(seen) >= n_starts:
            break
        # skip neighbours of an already refined basin
        if any(abs(int(i) - s) <= 1 for s in seen):
            continue
        seen.add(int(i))
        a = max(lo, xs[i] - step)
        b = min(hi, xs[i] + step)
        x, fx = golden_max(lambda t: np.asarray(f(t), dtype=float), a, b, tol=tol)
        if fx > best_f:
            best_x, best_f = x, fx
    return float(best_x), float(best_f)
