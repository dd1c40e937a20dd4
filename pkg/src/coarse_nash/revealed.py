"""The preference relation revealed by a solution on two-point problems.

x is weakly preferred to y when x is chosen from cmp{x, y}. From this
relation the improving set of a scale-invariant solution can be read off at
any base point, which gives an executable roundtrip between solutions and
improving sets.
"""

from __future__ import annotations

import threading
from typing import Sequence

import numpy as np

from coarse_nash import improving as imp
from coarse_nash.axioms import AxiomVerdict
from coarse_nash.model import EQ_TOL, BargainingProblem, as_point
from coarse_nash.rules import CoarseNashRule, rule_name

BOUNDARY_BAND = 1e-6
PROBE_RADII = (0.05, 5.0)


class RevealedRelation:
    """Pairwise comparisons of a solution, memoised.

    The cache stores, for each unordered pair, which of the two points the
    solution chooses; it is shared safely across threads.
    """

    def __init__(self, F):
        self.F = F
        self._cache: dict[tuple, tuple[bool, bool]] = {}
        self._lock = threading.Lock()

    @property
    def name(self) -> str:
        return rule_name(self.F)

    def _chosen_pair(self, x, y) -> tuple[bool, bool]:
        key = (x, y) if x <= y else (y, x)
        with self._lock:
            hit = self._cache.get(key)
        if hit is None:
            chosen = self.F(BargainingProblem(len(x), key)).chosen_set
            hit = (key[0] in chosen, key[1] in chosen)
            with self._lock:
                self._cache[key] = hit
        return hit if key[0] == x else (hit[1], hit[0])

    def weakly_prefers(self, x, y) -> bool:
        x = as_point(x)
        y = as_point(y, len(x))
        if max(abs(a - b) for a, b in zip(x, y)) <= EQ_TOL:
            return True
        return self._chosen_pair(x, y)[0]

    def strictly_prefers(self, x, y) -> bool:
        x = as_point(x)
        y = as_point(y, len(x))
        if max(abs(a - b) for a, b in zip(x, y)) <= EQ_TOL:
            return False
        cx, cy = self._chosen_pair(x, y)
        return cx and not cy

    def cache_size(self) -> int:
        with self._lock:
            return len(self._cache)


def weakly_prefers(R: RevealedRelation, x, y) -> bool:
    return R.weakly_prefers(x, y)


def strictly_prefers(R: RevealedRelation, x, y) -> bool:
    return R.strictly_prefers(x, y)


def _as_relation(R) -> RevealedRelation:
    return R if isinstance(R, RevealedRelation) else RevealedRelation(R)


def probe_vectors(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """Log-space probes: Gaussian direction, radius log-uniform in PROBE_RADII."""
    return imp.sample_directions(rng, count, n, *PROBE_RADII)


def _pt(v) -> tuple[float, ...]:
    return tuple(float(c) for c in v)


def _random_points(rng, count, n, radius=1.0):
    return np.exp(rng.uniform(-radius, radius, size=(count, n)))


def _verdict(name, trials, bad, active=None):
    status = "FAIL" if bad else "PASS"
    return AxiomVerdict(name, status, trials, 1 if bad else 0, bad, active=active)


# --------------------------------------------------------------------------
# properties of the relation
# --------------------------------------------------------------------------


def check_quasi_transitivity(R, triples: int = 10_000, seed: int = 0, n: int = 2) -> AxiomVerdict:
    """x ≻ y and y ≻ z imply x ≻ z on sampled chains.

    Chains are built downward, y = x*exp(-d1) and z = y*exp(-d2), with the
    log steps shifted towards the positive diagonal so that most sampled
    steps are strict improvements and the implication is actually exercised.
    ``active`` on the verdict counts chains where the hypothesis held.
    """
    R = _as_relation(R)
    rng = np.random.default_rng(seed)
    X = _random_points(rng, triples, n)
    shift = rng.uniform(0.0, 0.3, size=(triples, 2, 1))
    D1 = probe_vectors(rng, triples, n) * 0.2 + shift[:, 0]
    D2 = probe_vectors(rng, triples, n) * 0.2 + shift[:, 1]
    Y = X * np.exp(-D1)
    Z = Y * np.exp(-D2)
    active = 0
    for x, y, z in zip(X, Y, Z):
        x, y, z = _pt(x), _pt(y), _pt(z)
        if R.strictly_prefers(x, y) and R.strictly_prefers(y, z):
            active += 1
            if not R.strictly_prefers(x, z):
                return _verdict("quasi_transitivity", triples,
                                {"rule": R.name, "x": list(x), "y": list(y), "z": list(z)}, active)
    return _verdict("quasi_transitivity", triples, None, active)


def check_transitivity(R, triples: int = 10_000, seed: int = 0, n: int = 2) -> AxiomVerdict:
    """Weak preference is transitive on sampled triples."""
    R = _as_relation(R)
    rng = np.random.default_rng(seed)
    X = _random_points(rng, triples, n)
    Y = X * np.exp(-probe_vectors(rng, triples, n) * 0.3)
    Z = Y * np.exp(-probe_vectors(rng, triples, n) * 0.3)
    active = 0
    for x, y, z in zip(X, Y, Z):
        x, y, z = _pt(x), _pt(y), _pt(z)
        if R.weakly_prefers(x, y) and R.weakly_prefers(y, z):
            active += 1
            if not R.weakly_prefers(x, z):
                return _verdict("transitivity", triples,
                                {"rule": R.name, "x": list(x), "y": list(y), "z": list(z)}, active)
    return _verdict("transitivity", triples, None, active)


def check_completeness(R, pairs: int = 1000, seed: int = 0, n: int = 2) -> AxiomVerdict:
    R = _as_relation(R)
    rng = np.random.default_rng(seed)
    X = _random_points(rng, pairs, n)
    Y = _random_points(rng, pairs, n)
    for x, y in zip(X, Y):
        x, y = _pt(x), _pt(y)
        if not (R.weakly_prefers(x, y) or R.weakly_prefers(y, x)):
            return _verdict("completeness", pairs, {"rule": R.name, "x": list(x), "y": list(y)})
    return _verdict("completeness", pairs, None)


def check_monotone_relation(R, pairs: int = 1000, seed: int = 0, n: int = 2) -> AxiomVerdict:
    """x ≫ y implies x ≻ y."""
    R = _as_relation(R)
    rng = np.random.default_rng(seed)
    X = _random_points(rng, pairs, n)
    Y = X * np.exp(-np.abs(probe_vectors(rng, pairs, n)) - 1e-6)
    for x, y in zip(X, Y):
        x, y = _pt(x), _pt(y)
        if not R.strictly_prefers(x, y):
            return _verdict("monotone", pairs, {"rule": R.name, "x": list(x), "y": list(y)})
    return _verdict("monotone", pairs, None)


# --------------------------------------------------------------------------
# reconstructing the improving set
# --------------------------------------------------------------------------


class ReconstructedSet:
    """Membership oracle z -> [base * exp(z) ≻ base]."""

    def __init__(self, R, base: Sequence[float]):
        self.R = _as_relation(R)
        self.base = as_point(base)
        self._log_base = np.log(np.asarray(self.base))

    @property
    def n(self) -> int:
        return len(self.base)

    def __call__(self, z) -> bool:
        y = np.exp(self._log_base + np.asarray(z, dtype=np.float64))
        return self.R.strictly_prefers(_pt(y), self.base)

    def many(self, Z) -> np.ndarray:
        return np.array([self(z) for z in np.atleast_2d(Z)], dtype=bool)


def reconstruct_improving_set(F, base: Sequence[float]) -> ReconstructedSet:
    return ReconstructedSet(F, base)


def probe_cloud(F, base: Sequence[float], probes: int = 1000, seed: int = 0):
    """(Z, member flags) for plotting the reconstructed set."""
    rec = reconstruct_improving_set(F, base)
    Z = probe_vectors(np.random.default_rng(seed), probes, rec.n)
    return Z, rec.many(Z)


def _near_boundary(A, Z, band):
    if A is None or not imp.is_builtin(A):
        return np.zeros(len(Z), dtype=bool)
    return np.array([abs(imp.margin(A, z)) < band for z in Z], dtype=bool)


def check_base_independence(F, bases: Sequence[Sequence[float]], probes: int = 1000, seed: int = 0,
                            boundary_set=None, band: float = BOUNDARY_BAND) -> AxiomVerdict:
    """Reconstructed membership agrees across all bases on every probe.

    With ``boundary_set`` given (a built-in improving set), probes within
    ``band`` of its boundary are skipped.
    """
    R = _as_relation(F)
    recs = [ReconstructedSet(R, b) for b in bases]
    n = recs[0].n
    Z = probe_vectors(np.random.default_rng(seed), probes, n)
    skip = _near_boundary(boundary_set, Z, band)
    for z, s in zip(Z, skip):
        if s:
            continue
        flags = [r(z) for r in recs]
        if len(set(flags)) > 1:
            i = flags.index(not flags[0])
            witness = {"rule": R.name, "z": list(_pt(z)), "base_1": list(recs[0].base),
                       "base_2": list(recs[i].base), "member_1": flags[0], "member_2": flags[i]}
            v = _verdict("base_independence", probes, witness)
            v.skipped = int(skip.sum())
            return v
    v = _verdict("base_independence", probes, None)
    v.skipped = int(skip.sum())
    return v


def roundtrip_check(A, probes: int = 1000, seed: int = 0, n: int | None = None,
                    base: Sequence[float] | None = None, band: float = BOUNDARY_BAND) -> AxiomVerdict:
    """Membership read back from coarse_nash(A) matches A away from its boundary."""
    n = imp.set_dimension(A, n)
    base = base or (1.0,) * n
    rec = reconstruct_improving_set(CoarseNashRule(A), base)
    Z = probe_vectors(np.random.default_rng(seed), probes, n)
    skip = _near_boundary(A, Z, band)
    truth = imp.contains_many(A, Z)
    for z, t, s in zip(Z, truth, skip):
        if s:
            continue
        got = rec(z)
        if got != bool(t):
            v = _verdict("roundtrip", probes, {"set": imp.describe(A), "z": list(_pt(z)),
                                                "expected": bool(t), "reconstructed": got})
            v.skipped = int(skip.sum())
            return v
    v = _verdict("roundtrip", probes, None)
    v.skipped = int(skip.sum())
    return v


def rationalized_choice(R, P: BargainingProblem) -> frozenset:
    """Pool points that no pool point is revealed strictly better than."""
    R = _as_relation(R)
    return frozenset(x for x in P.pool if not any(R.strictly_prefers(y, x) for y in P.pool if y != x))


def weak_rationalization_identity(F, P: BargainingProblem, R: RevealedRelation | None = None) -> bool:
    R = R if R is not None else RevealedRelation(F)
    return F(P).chosen_set == rationalized_choice(R, P)

