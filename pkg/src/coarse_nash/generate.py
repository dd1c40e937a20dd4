"""Seeded random bargaining problems and problem pairs for the property checks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from coarse_nash.model import BargainingProblem, InputError, union_problem


@dataclass(frozen=True)
class GeneratorConfig:
    """How random problems are drawn.

    Coordinates are log-uniform on [e^-log_radius, e^log_radius]. Fresh
    generators used to expand a problem are, with probability
    ``local_fraction``, small multiplicative perturbations of an existing
    undominated generator; this is what makes expansions interact with the
    chosen set often enough to matter. With probability ``level_fraction`` a
    problem's generators are instead spread along a level set of the Nash
    product with log-sum jitter up to ``level_jitter``, so near-ties (and
    with them multi-point coarse solutions) are common.
    """

    ns: tuple[int, ...] = (2, 3)
    min_gens: int = 3
    max_gens: int = 40
    log_radius: float = 2.0
    symmetric: bool = False
    local_fraction: float = 0.5
    local_scale: float = 0.1
    level_fraction: float = 0.3
    level_jitter: float = 0.2
    corpus: tuple[BargainingProblem, ...] = ()

    def __post_init__(self):
        if not self.ns or any(n < 2 for n in self.ns):
            raise InputError("player counts must be >= 2")
        if not 1 <= self.min_gens <= self.max_gens:
            raise InputError("need 1 <= min_gens <= max_gens")


def _draw_points(rng, count, n, radius):
    return np.exp(rng.uniform(-radius, radius, size=(count, n)))


def _draw_level_points(rng, count, n, radius, jitter):
    L = rng.uniform(-radius, radius, size=(count, n))
    L -= L.mean(axis=1, keepdims=True)
    L += rng.uniform(-jitter, 0.0, size=(count, 1)) / n
    return np.exp(L)


def _symmetrize(points):
    n = points.shape[1]
    out = {tuple(float(v) for v in p[list(perm)]) for p in points for perm in itertools.permutations(range(n))}
    return sorted(out)


def random_problem(rng: np.random.Generator, cfg: GeneratorConfig, n: int | None = None,
                   label: str = "", symmetric: bool | None = None) -> BargainingProblem:
    symmetric = cfg.symmetric if symmetric is None else symmetric
    if cfg.corpus and n is None and not symmetric:
        return cfg.corpus[int(rng.integers(len(cfg.corpus)))]
    n = int(rng.choice(cfg.ns)) if n is None else n
    k = int(rng.integers(cfg.min_gens, cfg.max_gens + 1))
    if symmetric:
        k = max(1, k // math.factorial(n))
    if rng.random() < cfg.level_fraction:
        pts = _draw_level_points(rng, k, n, cfg.log_radius, cfg.level_jitter)
    else:
        pts = _draw_points(rng, k, n, cfg.log_radius)
    if symmetric:
        gens = _symmetrize(pts)
    else:
        gens = [tuple(float(v) for v in p) for p in pts]
    return BargainingProblem(n, tuple(gens), label)


def fresh_generators(rng: np.random.Generator, P: BargainingProblem, count: int, cfg: GeneratorConfig) -> np.ndarray:
    out = _draw_points(rng, count, P.n, cfg.log_radius)
    pool = P.pool_array()
    for i in range(count):
        if rng.random() < cfg.local_fraction:
            base = pool[int(rng.integers(len(pool)))]
            out[i] = base * np.exp(rng.uniform(-cfg.local_scale, cfg.local_scale, size=P.n))
    return out


def _as_problem(points, n, symmetric, label):
    gens = _symmetrize(points) if symmetric else [tuple(float(v) for v in p) for p in points]
    return BargainingProblem(n, tuple(gens), label)


def nested_pair(rng: np.random.Generator, cfg: GeneratorConfig, n: int | None = None,
                symmetric: bool | None = None):
    """(S, S') with S' = S ∪ cmp{1 to 3 fresh generators}."""
    symmetric = cfg.symmetric if symmetric is None else symmetric
    S = random_problem(rng, cfg, n, "S", symmetric)
    k = int(rng.integers(1, 4))
    extra = _as_problem(fresh_generators(rng, S, k, cfg), S.n, symmetric, "S'")
    return S, union_problem(S, extra, "S'")


def overlapping_pair(rng: np.random.Generator, cfg: GeneratorConfig, n: int | None = None,
                     symmetric: bool | None = None):
    """(S, T) sharing a random subset of S's undominated generators."""
    symmetric = cfg.symmetric if symmetric is None else symmetric
    S = random_problem(rng, cfg, n, "S", symmetric)
    pool = S.pool_array()
    shared = pool[rng.random(len(pool)) < 0.5]
    k = int(rng.integers(1, max(2, len(pool)) + 1))
    fresh = fresh_generators(rng, S, k, cfg)
    pts = np.vstack([shared, fresh]) if len(shared) else fresh
    T = _as_problem(pts, S.n, symmetric, "T")
    return S, T


def random_scale(rng: np.random.Generator, n: int, radius: float = 2.0) -> tuple[float, ...]:
    return tuple(float(v) for v in np.exp(rng.uniform(-radius, radius, size=n)))


def random_weights(rng: np.random.Generator, n: int) -> tuple[float, ...]:
    from coarse_nash.improving import normalized

    return normalized(rng.dirichlet(np.ones(n)))


def corpus(seed: int, k: int, n: int, cfg: GeneratorConfig | None = None, symmetric: bool = False):
    """k labelled problems, reproducible from the seed."""
    if k <= 0:
        raise InputError("empty corpus: k must be positive")
    cfg = cfg or GeneratorConfig(ns=(n,))
    rng = np.random.default_rng(seed)
    return [random_problem(rng, cfg, n, f"p{i:04d}", symmetric) for i in range(k)]
