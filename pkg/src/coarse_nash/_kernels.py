"""Hot inner loops: pairwise dominance, generator pruning, hull distances.

Every kernel has a numba version and a pure-numpy version with identical
semantics. Set ``COARSE_NASH_DISABLE_NUMBA=1`` to force the numpy path
(also used automatically when numba is not importable).
"""

from __future__ import annotations

import os

import numpy as np

MODE_ORTHANT = 0
MODE_CONE = 1
MODE_THRESHOLD = 2

_DISABLED = os.environ.get("COARSE_NASH_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("numba disabled by COARSE_NASH_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------


def _np_dominated_by(cand_logs, cand_scores, dom_logs, dom_scores, mode, eps, tol):
    out = np.zeros(cand_logs.shape[0], dtype=np.bool_)
    if dom_logs.shape[0] == 0:
        return out
    for j in range(cand_logs.shape[0]):
        if mode == MODE_CONE:
            hit = np.all(dom_scores - cand_scores[j] > tol, axis=1)
        else:
            hit = np.all(dom_logs - cand_logs[j] > tol, axis=1)
            if mode == MODE_THRESHOLD:
                hit |= dom_scores[:, 0] - cand_scores[j, 0] > eps + tol
        out[j] = bool(hit.any())
    return out


def _np_pruned_mask(points, tol):
    # points must be sorted lexicographically; among tolerance-duplicates the
    # last (largest) one survives.
    m = points.shape[0]
    keep = np.ones(m, dtype=np.bool_)
    for i in range(m):
        above = np.all(points >= points[i] - tol, axis=1)
        above[i] = False
        if not above.any():
            continue
        same = np.all(np.abs(points - points[i]) <= tol, axis=1)
        strictly = above & ~same
        if strictly.any() or np.any(same[i + 1:] & above[i + 1:]):
            keep[i] = False
    return keep


def _np_hull_contains(points, gens, tol):
    out = np.zeros(points.shape[0], dtype=np.bool_)
    for j in range(points.shape[0]):
        out[j] = bool(np.any(np.all(gens >= points[j] - tol, axis=1)))
    return out


def _np_hull_distance(points, gens):
    out = np.empty(points.shape[0])
    for j in range(points.shape[0]):
        excess = np.maximum(points[j] - gens, 0.0).max(axis=1)
        out[j] = excess.min()
    return out


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_dominated_by(cand_logs, cand_scores, dom_logs, dom_scores, mode, eps, tol):
        m = cand_logs.shape[0]
        k = dom_logs.shape[0]
        n = cand_logs.shape[1]
        r = cand_scores.shape[1]
        out = np.zeros(m, dtype=np.bool_)
        for j in range(m):
            for i in range(k):
                if mode == 1:
                    ok = True
                    for q in range(r):
                        if not (dom_scores[i, q] - cand_scores[j, q] > tol):
                            ok = False
                            break
                else:
                    ok = True
                    for q in range(n):
                        if not (dom_logs[i, q] - cand_logs[j, q] > tol):
                            ok = False
                            break
                    if not ok and mode == 2:
                        ok = dom_scores[i, 0] - cand_scores[j, 0] > eps + tol
                if ok:
                    out[j] = True
                    break
        return out

    @njit(cache=True)
    def _nb_pruned_mask(points, tol):
        m = points.shape[0]
        n = points.shape[1]
        keep = np.ones(m, dtype=np.bool_)
        for i in range(m):
            for j in range(m):
                if j == i:
                    continue
                above = True
                same = True
                for q in range(n):
                    if points[j, q] < points[i, q] - tol:
                        above = False
                        break
                    if abs(points[j, q] - points[i, q]) > tol:
                        same = False
                if above and (not same or j > i):
                    keep[i] = False
                    break
        return keep

    @njit(cache=True)
    def _nb_hull_contains(points, gens, tol):
        m = points.shape[0]
        out = np.zeros(m, dtype=np.bool_)
        for j in range(m):
            for i in range(gens.shape[0]):
                ok = True
                for q in range(points.shape[1]):
                    if gens[i, q] < points[j, q] - tol:
                        ok = False
                        break
                if ok:
                    out[j] = True
                    break
        return out

    @njit(cache=True)
    def _nb_hull_distance(points, gens):
        m = points.shape[0]
        out = np.empty(m)
        for j in range(m):
            best = np.inf
            for i in range(gens.shape[0]):
                worst = 0.0
                for q in range(points.shape[1]):
                    d = points[j, q] - gens[i, q]
                    if d > worst:
                        worst = d
                if worst < best:
                    best = worst
            out[j] = best
        return out


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def dominated_by(cand_logs, cand_scores, dom_logs, dom_scores, mode, eps, tol, *, backend=None):
    """For each candidate row, does some dominator row dominate it?

    ``mode`` selects the rule: orthant (every log-coordinate gap > tol), cone
    (every score gap > tol) or threshold (orthant, or first score gap > eps + tol).
    """
    args = (_f64(cand_logs), _f64(cand_scores), _f64(dom_logs), _f64(dom_scores), int(mode), float(eps), float(tol))
    if _use_numba(backend):
        return _nb_dominated_by(*args)
    return _np_dominated_by(*args)


def pruned_mask(points, tol, *, backend=None):
    """Rows not weakly below another row; lexicographically sorted input expected."""
    pts = _f64(points)
    if _use_numba(backend):
        return _nb_pruned_mask(pts, float(tol))
    return _np_pruned_mask(pts, float(tol))


def hull_contains(points, gens, tol, *, backend=None):
    pts, g = _f64(points), _f64(gens)
    if _use_numba(backend):
        return _nb_hull_contains(pts, g, float(tol))
    return _np_hull_contains(pts, g, float(tol))


def hull_distance(points, gens, *, backend=None):
    """Sup-norm distance from each point to cmp(gens)."""
    pts, g = _f64(points), _f64(gens)
    if _use_numba(backend):
        return _nb_hull_distance(pts, g)
    return _np_hull_distance(pts, g)


def _use_numba(backend):
    if backend is None:
        return HAVE_NUMBA
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        return True
    if backend == "numpy":
        return False
    raise ValueError(f"unknown backend {backend!r}")


def sorted_scores(logs, weights):
    """Weighted log scores, summed over sorted terms.

    Sorting the per-coordinate terms makes the score bit-identical under any
    coordinate permutation of a point when the weights are uniform.
    """
    logs = np.atleast_2d(np.asarray(logs, dtype=np.float64))
    weights = np.atleast_2d(np.asarray(weights, dtype=np.float64))
    terms = weights[None, :, :] * logs[:, None, :]
    terms.sort(axis=-1)
    out = np.zeros(terms.shape[:2])
    for q in range(terms.shape[-1]):
        out += terms[:, :, q]
    return out
