"""Coarse Nash, weighted Nash, Nash and weak Pareto solutions on finite pools."""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from coarse_nash import _kernels
from coarse_nash.improving import (
    DEFAULT_TOL,
    CustomPredicate,
    HalfSpace,
    InvalidImprovingSetError,
    Orthant,
    contains,
    kernel_params,
    uniform_weights,
    validate,
    weight_vector,
)
from coarse_nash.model import EQ_TOL, BargainingProblem, InputError, Point

MAX_GRID_POINTS = 1_000_000


@dataclass(frozen=True)
class SolutionSet:
    """Chosen points, with the candidate pool the selection ran over.

    Both tuples are sorted lexicographically.
    """

    chosen: tuple[Point, ...]
    candidate_pool: tuple[Point, ...]

    def __post_init__(self):
        chosen = tuple(sorted(set(self.chosen)))
        pool = tuple(sorted(set(self.candidate_pool)))
        pool_set = set(pool)
        if any(c not in pool_set for c in chosen):
            raise ValueError("chosen points must come from the candidate pool")
        if pool and not chosen:
            raise ValueError("solutions are nonempty on nonempty pools")
        object.__setattr__(self, "chosen", chosen)
        object.__setattr__(self, "candidate_pool", pool)

    @property
    def chosen_set(self) -> frozenset:
        return frozenset(self.chosen)

    def __contains__(self, x) -> bool:
        return tuple(x) in self.chosen_set

    def __len__(self) -> int:
        return len(self.chosen)


def _pool_logs(P: BargainingProblem) -> np.ndarray:
    return np.log(P.pool_array())


@functools.lru_cache(maxsize=64)
def _custom_report(A: CustomPredicate, n: int):
    return validate(A, trials=200, seed=0, n=n)


def _require_usable(A, n: int, tol: float):
    if isinstance(A, CustomPredicate):
        if not A.declared_open:
            raise InvalidImprovingSetError("open", f"{A.label} is not declared open")
        if A.n != n:
            raise InputError(f"dimension mismatch: set has n={A.n}, problem n={n}")
        report = _custom_report(A, n)
        bad = report.failing()
        if bad is not None:
            raise InvalidImprovingSetError(bad.condition, f"{A.label} failed sampled validation ({bad.status})", bad.witness)
        if report.verdict("monotone").status != "PASS":
            warnings.warn(
                f"{A.label} is not monotone on samples; generator-pool solutions may differ "
                "from the hull-level definition, cross-check with grid_oracle",
                stacklevel=3,
            )


def coarse_nash(A, P: BargainingProblem, tol: float = DEFAULT_TOL) -> SolutionSet:
    """Pool points that no pool point dominates under improving set ``A``."""
    _require_usable(A, P.n, tol)
    pool = P.pool
    if isinstance(A, CustomPredicate):
        L = _pool_logs(P)
        keep = [
            not any(j != i and contains(A, L[j] - L[i], tol) for j in range(len(pool)))
            for i in range(len(pool))
        ]
    else:
        mode, W, eps = kernel_params(A, P.n)
        L = _pool_logs(P)
        S = _kernels.sorted_scores(L, W)
        keep = ~_kernels.dominated_by(L, S, L, S, mode, eps, tol)
    chosen = tuple(x for x, k in zip(pool, keep) if k)
    if not chosen:
        raise InvalidImprovingSetError("ii", "every pool point is dominated; the relation has a cycle")
    return SolutionSet(chosen, pool)


def weighted_nash(w: Sequence[float], P: BargainingProblem, tol: float = DEFAULT_TOL) -> SolutionSet:
    """Maximisers of sum_i w_i log x_i over the pool, within ``tol``."""
    w = weight_vector(w)
    if len(w) != P.n:
        raise InputError(f"dimension mismatch: weights have n={len(w)}, problem n={P.n}")
    s = _kernels.sorted_scores(_pool_logs(P), np.array([w]))[:, 0]
    best = s.max()
    chosen = tuple(x for x, v in zip(P.pool, s) if best - v <= tol)
    return SolutionSet(chosen, P.pool)


def nash(P: BargainingProblem, tol: float = DEFAULT_TOL) -> SolutionSet:
    return weighted_nash(uniform_weights(P.n), P, tol)


def weak_pareto(P: BargainingProblem, tol: float = DEFAULT_TOL) -> SolutionSet:
    return coarse_nash(Orthant(), P, tol)


def _log_grid(P: BargainingProblem, resolution: float, margin: float = 1.0):
    G = P.pool_array()
    lo, hi = np.log(G.min(axis=0)) - margin, np.log(G.max(axis=0))
    counts = np.floor((hi - lo) / resolution + 1e-9).astype(int) + 1
    return lo, hi, counts


def grid_size(P: BargainingProblem, resolution: float) -> int:
    _, _, counts = _log_grid(P, resolution)
    return int(np.prod(counts.astype(float)))


def grid_points(P: BargainingProblem, resolution: float) -> np.ndarray:
    """Log-uniform grid over the generator bounding box, restricted to the hull.

    Each axis runs down from the largest generator coordinate in steps of
    ``resolution`` in log space, stopping one log unit below the smallest.
    """
    if not resolution > 0:
        raise InputError(f"resolution must be positive, got {resolution}")
    lo, hi, counts = _log_grid(P, resolution)
    total = float(np.prod(counts.astype(float)))
    if total > MAX_GRID_POINTS:
        raise InputError(f"grid would have ~{int(total)} points (> {MAX_GRID_POINTS}); use a coarser resolution")
    axes = [h - resolution * np.arange(c) for h, c in zip(hi, counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    logs = np.stack([m.ravel() for m in mesh], axis=1)
    pts = np.exp(logs)
    inside = _kernels.hull_contains(pts, P.pool_array(), EQ_TOL)
    return pts[inside]


def grid_oracle(A, P: BargainingProblem, resolution: float, tol: float = DEFAULT_TOL) -> SolutionSet:
    """Brute force over a hull discretisation: grid points no grid point dominates."""
    pts = grid_points(P, resolution)
    L = np.log(pts)
    if isinstance(A, CustomPredicate):
        keep = [not any(j != i and contains(A, L[j] - L[i], tol) for j in range(len(L))) for i in range(len(L))]
        keep = np.array(keep, dtype=bool)
    else:
        mode, W, eps = kernel_params(A, P.n)
        S = _kernels.sorted_scores(L, W)
        order = np.argsort(-S[:, 0], kind="stable")  # strong dominators first
        keep = ~_kernels.dominated_by(L, S, L[order], S[order], mode, eps, tol)
    pool = tuple(tuple(float(v) for v in p) for p in pts)
    chosen = tuple(p for p, k in zip(pool, keep) if k)
    return SolutionSet(chosen, pool)


def grid_refutations(A, P: BargainingProblem, chosen: Sequence[Point], resolution: float,
                     tol: float = DEFAULT_TOL) -> list[tuple[Point, Point]]:
    """(grid point, chosen point) pairs where the grid point dominates a chosen point."""
    pts = grid_points(P, resolution)
    if len(chosen) == 0 or len(pts) == 0:
        return []
    C = np.array(chosen, dtype=np.float64)
    Lc, Lg = np.log(C), np.log(pts)
    if isinstance(A, CustomPredicate):
        hits = [(tuple(pts[j]), tuple(C[i])) for i in range(len(C)) for j in range(len(pts))
                if contains(A, Lg[j] - Lc[i], tol)]
        return hits
    mode, W, eps = kernel_params(A, P.n)
    Sc, Sg = _kernels.sorted_scores(Lc, W), _kernels.sorted_scores(Lg, W)
    out = []
    bad = _kernels.dominated_by(Lc, Sc, Lg, Sg, mode, eps, tol)
    for i in np.flatnonzero(bad):
        for j in range(len(pts)):
            if _kernels.dominated_by(Lc[i:i + 1], Sc[i:i + 1], Lg[j:j + 1], Sg[j:j + 1], mode, eps, tol)[0]:
                out.append((tuple(float(v) for v in pts[j]), tuple(float(v) for v in C[i])))
                break
    return out


def log_score(x: Sequence[float], w: Sequence[float] | None = None) -> float:
    """sum_i w_i log x_i (uniform weights by default)."""
    w = uniform_weights(len(x)) if w is None else w
    return math.fsum(wi * math.log(xi) for wi, xi in zip(w, x))

