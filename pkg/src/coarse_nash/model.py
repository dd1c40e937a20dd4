"""Bargaining problems as comprehensive hulls of finitely many generators."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from coarse_nash import _kernels

MAX_PLAYERS = 16
MAX_PERMUTATION_PLAYERS = 8
EQ_TOL = 1e-12

Point = tuple  # tuple[float, ...]; a strictly positive utility vector


class InputError(ValueError):
    """Malformed or inconsistent input."""


def as_point(x: Iterable[float], n: int | None = None) -> Point:
    """Validate and normalise a utility vector to a tuple of floats."""
    pt = tuple(float(v) for v in x)
    if len(pt) < 2:
        raise InputError(f"utility vectors need at least 2 coordinates, got {len(pt)}")
    if len(pt) > MAX_PLAYERS:
        raise InputError(f"at most {MAX_PLAYERS} players supported, got {len(pt)}")
    if n is not None and len(pt) != n:
        raise InputError(f"dimension mismatch: expected {n}, got {len(pt)}")
    if not all(math.isfinite(v) and v > 0 for v in pt):
        raise InputError(f"coordinates must be finite and strictly positive: {pt}")
    return pt


@dataclass(frozen=True)
class Permutation:
    """Bijection on player indices, stored 0-based: ``x_p[i] = x[mapping[i]]``."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(i) for i in self.mapping)
        if sorted(m) != list(range(len(m))):
            raise InputError(f"not a permutation of 0..{len(m) - 1}: {m}")
        object.__setattr__(self, "mapping", m)

    @classmethod
    def from_one_based(cls, mapping: Sequence[int]) -> "Permutation":
        return cls(tuple(int(i) - 1 for i in mapping))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.mapping)


def all_permutations(n: int) -> list[Permutation]:
    if n > MAX_PERMUTATION_PLAYERS:
        raise InputError(f"n={n} > {MAX_PERMUTATION_PLAYERS}: use sampled permutations")
    return [Permutation(p) for p in itertools.permutations(range(n))]


def permute(x: Sequence[float], p: Permutation) -> Point:
    if len(x) != p.n:
        raise InputError(f"dimension mismatch: point has {len(x)}, permutation {p.n}")
    return tuple(x[i] for i in p.mapping)


@dataclass(frozen=True)
class BargainingProblem:
    """The comprehensive hull of a finite generator set.

    Generators are deduplicated and sorted on construction; ``pool`` holds the
    generators that no other generator weakly dominates.
    """

    n: int
    generators: tuple[Point, ...]
    label: str = ""
    pool: tuple[Point, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 2 <= self.n <= MAX_PLAYERS:
            raise InputError(f"player count must be in [2, {MAX_PLAYERS}], got {self.n}")
        if len(self.generators) == 0:
            raise InputError("a problem needs at least one generator")
        gens = sorted(set(as_point(g, self.n) for g in self.generators))
        object.__setattr__(self, "generators", tuple(gens))
        arr = np.array(gens)
        keep = _kernels.pruned_mask(arr, EQ_TOL)
        object.__setattr__(self, "pool", tuple(g for g, k in zip(gens, keep) if k))

    @classmethod
    def of(cls, generators: Iterable[Iterable[float]], label: str = "") -> "BargainingProblem":
        gens = [tuple(float(v) for v in g) for g in generators]
        if not gens:
            raise InputError("a problem needs at least one generator")
        return cls(len(gens[0]), tuple(gens), label)

    def pool_array(self) -> np.ndarray:
        return np.array(self.pool, dtype=np.float64)

    def __contains__(self, x) -> bool:
        return comprehensive_contains(self, x)


def comprehensive_contains(P: BargainingProblem, x: Sequence[float]) -> bool:
    x = as_point(x, P.n)
    return bool(_kernels.hull_contains(np.array([x]), P.pool_array(), EQ_TOL)[0])


def contains_many(P: BargainingProblem, points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, P.n)
    return _kernels.hull_contains(pts, P.pool_array(), EQ_TOL)


def strictly_dominated_within(candidates: Iterable[Sequence[float]], x: Sequence[float]) -> bool:
    """True iff some candidate is strictly larger than ``x`` in every coordinate."""
    cands = [tuple(c) for c in candidates]
    if not cands:
        raise InputError("empty candidate set")
    arr = np.asarray(cands, dtype=np.float64)
    xa = np.asarray(x, dtype=np.float64)
    if arr.shape[1] != xa.shape[0]:
        raise InputError("dimension mismatch")
    return bool(np.any(np.all(arr > xa, axis=1)))


def is_symmetric_problem(P: BargainingProblem) -> bool:
    perms = all_permutations(P.n)
    pts = np.array([permute(g, p) for g in P.pool for p in perms])
    return bool(contains_many(P, pts).all())


def scale_point(a: Sequence[float], x: Sequence[float]) -> Point:
    return tuple(ai * xi for ai, xi in zip(a, x))


def scale_problem(a: Sequence[float], P: BargainingProblem) -> BargainingProblem:
    a = as_point(a, P.n)
    return BargainingProblem(P.n, tuple(scale_point(a, g) for g in P.generators), P.label)


def permute_problem(P: BargainingProblem, p: Permutation) -> BargainingProblem:
    return BargainingProblem(P.n, tuple(permute(g, p) for g in P.generators), P.label)


def union_problem(P: BargainingProblem, Q: BargainingProblem, label: str | None = None) -> BargainingProblem:
    """cmp(G_P ∪ G_Q); the result keeps only undominated generators."""
    if P.n != Q.n:
        raise InputError(f"dimension mismatch: {P.n} vs {Q.n}")
    if label is None:
        label = P.label if P.label == Q.label else f"{P.label}+{Q.label}"
    merged = BargainingProblem(P.n, P.pool + Q.pool, label)
    return BargainingProblem(P.n, merged.pool, label)


def _box_grid(lo, hi, resolution):
    axes = [np.arange(0.0, h + resolution / 2, resolution) for h in hi]
    axes = [ax[ax >= l] for ax, l in zip(axes, lo)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def hausdorff_approx(P: BargainingProblem, Q: BargainingProblem, resolution: float) -> float:
    """Grid-sampled sup-norm Hausdorff distance between cmp(P) and cmp(Q).

    Both hulls are intersected with the box [0, max generator coordinate] and
    sampled on a regular grid of the given spacing. Distances from grid points
    to the other hull are exact (the hull is a finite union of boxes), so the
    error comes only from the grid. Approximate by design.
    """
    if not resolution > 0:
        raise InputError(f"resolution must be positive, got {resolution}")
    if P.n != Q.n:
        raise InputError(f"dimension mismatch: {P.n} vs {Q.n}")
    gp, gq = P.pool_array(), Q.pool_array()
    hi = np.maximum(gp.max(axis=0), gq.max(axis=0))
    cells = np.prod(np.floor(hi / resolution) + 1)
    if cells > 5e6:
        raise InputError(f"grid of ~{int(cells)} points too large; use a coarser resolution")
    grid = _box_grid(np.full(P.n, resolution), hi, resolution)
    # gens themselves are the extreme points that the grid may miss
    grid = np.vstack([grid, gp, gq])
    in_p = _kernels.hull_contains(grid, gp, EQ_TOL)
    in_q = _kernels.hull_contains(grid, gq, EQ_TOL)
    d = 0.0
    if in_q.any():
        d = max(d, float(_kernels.hull_distance(grid[in_q], gp).max()))
    if in_p.any():
        d = max(d, float(_kernels.hull_distance(grid[in_p], gq).max()))
    return d
