"""Improving sets in log-utility space and the dominance relation they induce.

An improving set A is an open subset of R^n containing the strictly positive
orthant, missing every nonpositive vector, and closed under addition. ``y``
dominates ``x`` under A when ``log y - log x`` lies in A.

Membership uses open-set tolerance: points within ``tol`` of the boundary
count as outside A.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from coarse_nash import _kernels
from coarse_nash.model import InputError, as_point

DEFAULT_TOL = 1e-9
WEIGHT_SUM_TOL = 1e-12


class InvalidImprovingSetError(ValueError):
    """Raised when a candidate set fails one of the defining conditions."""

    def __init__(self, condition: str, message: str, witness=None):
        super().__init__(f"condition {condition}: {message}")
        self.condition = condition
        self.witness = witness


def weight_vector(w: Sequence[float]) -> tuple[float, ...]:
    """Validate a point of the weight simplex (zeros allowed)."""
    w = tuple(float(v) for v in w)
    if len(w) < 2:
        raise InputError("weight vectors need at least 2 coordinates")
    if any(not math.isfinite(v) or v < 0 for v in w):
        raise InputError(f"weights must be nonnegative: {w}")
    if abs(math.fsum(w) - 1.0) > WEIGHT_SUM_TOL:
        raise InputError(f"weights must sum to 1, got {math.fsum(w)!r}")
    return w


def normalized(w: Sequence[float]) -> tuple[float, ...]:
    """Rescale a nonnegative vector onto the simplex."""
    arr = np.asarray(w, dtype=np.float64)
    s = arr.sum()
    if s <= 0 or np.any(arr < 0):
        raise InputError(f"cannot normalise {tuple(w)} onto the simplex")
    out = arr / s
    out[-1] = 1.0 - out[:-1].sum()
    return tuple(float(v) for v in out)


def uniform_weights(n: int) -> tuple[float, ...]:
    return normalized([1.0] * n)


# --------------------------------------------------------------------------
# variants
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HalfSpace:
    """{z : sum_i w_i z_i > 0}; induces the weighted Nash solution."""

    w: tuple[float, ...]
    name = "half_space"

    def __post_init__(self):
        object.__setattr__(self, "w", weight_vector(self.w))

    @property
    def n(self) -> int:
        return len(self.w)


@dataclass(frozen=True)
class Orthant:
    """The strictly positive orthant; induces the weak Pareto solution."""

    n: int | None = None
    name = "orthant"


@dataclass(frozen=True)
class ConeIntersection:
    """{z : w.z > 0 for every w in W}; unanimity over several weighted Nash rules."""

    W: tuple[tuple[float, ...], ...]
    name = "cone"

    def __post_init__(self):
        if len(self.W) == 0:
            raise InputError("ConeIntersection needs at least one weight vector")
        W = tuple(sorted(set(weight_vector(w) for w in self.W)))
        if len({len(w) for w in W}) != 1:
            raise InputError("all weight vectors must share one dimension")
        object.__setattr__(self, "W", W)

    @property
    def n(self) -> int:
        return len(self.W[0])


@dataclass(frozen=True)
class NashThreshold:
    """Orthant ∪ {z : sum_i z_i > epsilon}: a Nash-product gain above a threshold."""

    epsilon: float
    n: int | None = None
    name = "nash_threshold"

    def __post_init__(self):
        eps = float(self.epsilon)
        if not (math.isfinite(eps) and eps > 0):
            raise InputError(f"epsilon must be positive, got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", eps)


@dataclass(frozen=True, eq=False)
class CustomPredicate:
    """Arbitrary membership function on log-difference vectors.

    Carries no structural guarantee. ``declared_open`` is taken on trust;
    the solver refuses sets declared closed.
    """

    member: Callable[[np.ndarray], bool] = field(compare=False)
    n: int
    declared_open: bool = True
    label: str = "custom"
    name = "custom"


ImprovingSet = HalfSpace | Orthant | ConeIntersection | NashThreshold | CustomPredicate
BUILTIN_TYPES = (HalfSpace, Orthant, ConeIntersection, NashThreshold)


def is_builtin(A) -> bool:
    return isinstance(A, BUILTIN_TYPES)


def set_dimension(A, n: int | None = None) -> int:
    """Dimension to sample ``A`` in; free-dimension sets fall back to ``n`` or 2."""
    own = getattr(A, "n", None)
    if own is not None:
        if n is not None and n != own:
            raise InputError(f"dimension mismatch: set has n={own}, requested {n}")
        return own
    return 2 if n is None else n


def describe(A) -> str:
    if isinstance(A, HalfSpace):
        return "half_space(" + ",".join(f"{v:g}" for v in A.w) + ")"
    if isinstance(A, Orthant):
        return "orthant"
    if isinstance(A, ConeIntersection):
        return "cone(" + ";".join(",".join(f"{v:g}" for v in w) for w in A.W) + ")"
    if isinstance(A, NashThreshold):
        return f"nash_threshold({A.epsilon:g})"
    return A.label


# --------------------------------------------------------------------------
# kernel encoding
# --------------------------------------------------------------------------


def kernel_params(A, n: int):
    """(mode, score weights, eps) for the built-in dominance kernel."""
    if isinstance(A, Orthant):
        if A.n is not None and A.n != n:
            raise InputError(f"dimension mismatch: set has n={A.n}, problem n={n}")
        return _kernels.MODE_ORTHANT, np.ones((1, n)), 0.0
    if isinstance(A, HalfSpace):
        _check_n(A.n, n)
        return _kernels.MODE_CONE, np.array([A.w]), 0.0
    if isinstance(A, ConeIntersection):
        _check_n(A.n, n)
        return _kernels.MODE_CONE, np.array(A.W), 0.0
    if isinstance(A, NashThreshold):
        if A.n is not None and A.n != n:
            raise InputError(f"dimension mismatch: set has n={A.n}, problem n={n}")
        return _kernels.MODE_THRESHOLD, np.ones((1, n)), A.epsilon
    raise TypeError(f"no kernel encoding for {type(A).__name__}")


def _check_n(own, n):
    if own != n:
        raise InputError(f"dimension mismatch: set has n={own}, problem n={n}")


# --------------------------------------------------------------------------
# membership and dominance
# --------------------------------------------------------------------------


def log_diff(y: Sequence[float], x: Sequence[float]) -> np.ndarray:
    y = as_point(y)
    x = as_point(x, len(y))
    return np.log(np.asarray(y)) - np.log(np.asarray(x))


def margin(A, z) -> float:
    """Signed slack of z against the boundary of a built-in set; member iff > tol."""
    z = np.asarray(z, dtype=np.float64)
    if isinstance(A, Orthant):
        return float(z.min())
    if isinstance(A, (HalfSpace, ConeIntersection)):
        W = np.array([A.w]) if isinstance(A, HalfSpace) else np.array(A.W)
        if W.shape[1] != z.shape[0]:
            raise InputError("dimension mismatch")
        return float(_kernels.sorted_scores(z, W)[0].min())
    if isinstance(A, NashThreshold):
        total = float(_kernels.sorted_scores(z, np.ones((1, z.shape[0])))[0, 0])
        return max(float(z.min()), total - A.epsilon)
    raise TypeError("margin is only defined for built-in sets")


def contains(A, z, tol: float = DEFAULT_TOL) -> bool:
    if isinstance(A, CustomPredicate):
        return bool(A.member(np.asarray(z, dtype=np.float64)))
    return margin(A, z) > tol


def contains_many(A, Z, tol: float = DEFAULT_TOL) -> np.ndarray:
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    if isinstance(A, CustomPredicate):
        return np.array([bool(A.member(z)) for z in Z], dtype=bool)
    n = Z.shape[1]
    if isinstance(A, Orthant):
        return Z.min(axis=1) > tol
    mode, W, eps = kernel_params(A, n)
    scores = _kernels.sorted_scores(Z, W)
    if mode == _kernels.MODE_CONE:
        return scores.min(axis=1) > tol
    return (Z.min(axis=1) > tol) | (scores[:, 0] > eps + tol)


def dominates(A, y, x, tol: float = DEFAULT_TOL) -> bool:
    return contains(A, log_diff(y, x), tol)


# --------------------------------------------------------------------------
# sampling and validation
# --------------------------------------------------------------------------


def sample_directions(rng: np.random.Generator, count: int, n: int, r_lo: float = 0.1, r_hi: float = 10.0) -> np.ndarray:
    """Gaussian directions scaled by a radius drawn log-uniformly in [r_lo, r_hi]."""
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = np.exp(rng.uniform(math.log(r_lo), math.log(r_hi), size=(count, 1)))
    return g * r


def sample_members(A, count: int, rng: np.random.Generator, n: int | None = None,
                   tol: float = DEFAULT_TOL, max_draws: int | None = None) -> np.ndarray:
    """Rejection-sample members of A; may return fewer than ``count`` rows."""
    n = set_dimension(A, n)
    max_draws = 100 * count if max_draws is None else max_draws
    found: list[np.ndarray] = []
    have = draws = 0
    while have < count and draws < max_draws:
        batch = min(max(2 * (count - have), 64), max_draws - draws)
        Z = sample_directions(rng, batch, n)
        draws += batch
        keep = Z[contains_many(A, Z, tol)]
        found.append(keep)
        have += len(keep)
    out = np.vstack(found) if found else np.empty((0, n))
    return out[:count]


def _tup(v) -> tuple[float, ...]:
    return tuple(float(c) for c in v)


@dataclass(frozen=True)
class ConditionVerdict:
    condition: str  # "i-lower", "i-upper", "ii", or "monotone"
    status: str  # PASS | FAIL | INCONCLUSIVE
    method: str  # "analytic" | "sampled"
    trials: int
    witness: tuple | None = None
    note: str = ""


@dataclass(frozen=True)
class ValidationReport:
    set_description: str
    verdicts: tuple[ConditionVerdict, ...]

    @property
    def passed(self) -> bool:
        return all(v.status == "PASS" for v in self.verdicts if v.condition != "monotone")

    def verdict(self, condition: str) -> ConditionVerdict:
        for v in self.verdicts:
            if v.condition == condition:
                return v
        raise KeyError(condition)

    def failing(self) -> ConditionVerdict | None:
        for v in self.verdicts:
            if v.status != "PASS" and v.condition != "monotone":
                return v
        return None


_ANALYTIC_TAGS = {
    Orthant: {
        "i-lower": "A is the positive orthant itself",
        "i-upper": "nonpositive vectors have a coordinate <= 0",
        "ii": "sums of positive vectors are positive",
    },
    HalfSpace: {
        "i-lower": "w >= 0 with sum 1 makes w.z > 0 on positive z",
        "i-upper": "w >= 0 makes w.z <= 0 on nonpositive z",
        "ii": "w.(x + y) = w.x + w.y > 0",
    },
    ConeIntersection: {
        "i-lower": "each half-space contains the positive orthant",
        "i-upper": "each half-space excludes nonpositive vectors",
        "ii": "intersection of additively closed sets is additively closed",
    },
    NashThreshold: {
        "i-lower": "orthant is one of the union's pieces",
        "i-upper": "nonpositive z is not positive and has sum <= 0 < epsilon",
        "ii": "orthant+orthant is positive; otherwise the sum exceeds epsilon",
    },
}


def validate(A, trials: int = 1000, seed: int = 0, n: int | None = None, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check conditions (i) and (ii); analytic for built-ins, sampled for custom sets."""
    n = set_dimension(A, n)
    if is_builtin(A):
        tags = _ANALYTIC_TAGS[type(A)]
        verdicts = tuple(ConditionVerdict(c, "PASS", "analytic", 0, note=t) for c, t in tags.items())
        return ValidationReport(describe(A), verdicts + (ConditionVerdict("monotone", "PASS", "analytic", 0),))
    rng = np.random.default_rng(seed)
    verdicts = [
        _check_lower(A, trials, rng, n, tol),
        _check_upper(A, trials, rng, n, tol),
        _check_additive(A, trials, rng, n, tol),
        _check_monotone(A, trials, rng, n, tol),
    ]
    return ValidationReport(describe(A), tuple(verdicts))


def _check_lower(A, trials, rng, n, tol):
    Z = np.abs(sample_directions(rng, trials, n)) + 1e-6
    bad = ~contains_many(A, Z, tol)
    if bad.any():
        return ConditionVerdict("i-lower", "FAIL", "sampled", trials, (_tup(Z[bad][0]),))
    return ConditionVerdict("i-lower", "PASS", "sampled", trials)


def _check_upper(A, trials, rng, n, tol):
    Z = -np.abs(sample_directions(rng, trials, n))
    Z[: min(trials, 1)] = 0.0
    bad = contains_many(A, Z, tol)
    if bad.any():
        return ConditionVerdict("i-upper", "FAIL", "sampled", trials, (_tup(Z[bad][0]),))
    return ConditionVerdict("i-upper", "PASS", "sampled", trials)


def _check_additive(A, trials, rng, n, tol):
    M = sample_members(A, 2 * trials, rng, n, tol)
    if len(M) < 2 * trials:
        return ConditionVerdict("ii", "INCONCLUSIVE", "sampled", len(M) // 2,
                                note="rejection sampling found too few members")
    X, Y = M[:trials], M[trials:]
    bad = ~contains_many(A, X + Y, tol)
    if bad.any():
        k = int(np.argmax(bad))
        return ConditionVerdict("ii", "FAIL", "sampled", trials, (_tup(X[k]), _tup(Y[k])))
    return ConditionVerdict("ii", "PASS", "sampled", trials)


def _check_monotone(A, trials, rng, n, tol):
    M = sample_members(A, trials, rng, n, tol)
    if len(M) == 0:
        return ConditionVerdict("monotone", "INCONCLUSIVE", "sampled", 0)
    bumps = np.abs(sample_directions(rng, len(M), n, 1e-3, 1.0))
    bad = ~contains_many(A, M + bumps, tol)
    if bad.any():
        k = int(np.argmax(bad))
        return ConditionVerdict("monotone", "FAIL", "sampled", len(M), (_tup(M[k]), _tup(M[k] + bumps[k])))
    return ConditionVerdict("monotone", "PASS", "sampled", len(M))


def find_additivity_witness(A, trials: int = 1000, seed: int = 0, n: int | None = None, tol: float = DEFAULT_TOL):
    """A member pair whose sum leaves A, or None."""
    v = _check_additive(A, trials, np.random.default_rng(seed), set_dimension(A, n), tol)
    return v.witness if v.status == "FAIL" else None


def _closed_under_permutations(W) -> bool:
    n = len(W[0])
    pts = np.array(W)
    for perm in itertools.permutations(range(n)):
        for w in W:
            wp = np.array([w[i] for i in perm])
            if not np.any(np.all(np.abs(pts - wp) <= WEIGHT_SUM_TOL, axis=1)):
                return False
    return True


def is_symmetric_set(A, trials: int = 1000, seed: int = 0, n: int | None = None) -> bool:
    if isinstance(A, (Orthant, NashThreshold)):
        return True
    if isinstance(A, HalfSpace):
        return max(A.w) - min(A.w) <= WEIGHT_SUM_TOL
    if isinstance(A, ConeIntersection):
        return _closed_under_permutations(A.W)
    n = set_dimension(A, n)
    rng = np.random.default_rng(seed)
    Z = sample_directions(rng, trials, n)
    base = contains_many(A, Z)
    for _ in range(4):
        perm = rng.permutation(n)
        if not np.array_equal(contains_many(A, Z[:, perm]), base):
            return False
    return True


def union_of_half_spaces(W: Sequence[Sequence[float]]) -> CustomPredicate:
    """{z : w.z > 0 for SOME w in W}. Not additively closed once |W| >= 2."""
    Wa = np.array([weight_vector(w) for w in W])

    def member(z):
        return bool(np.any(Wa @ z > DEFAULT_TOL))

    return CustomPredicate(member, Wa.shape[1], True, "union_of_half_spaces")


def truncated_half_space(w: Sequence[float], floor: float = 1.0) -> CustomPredicate:
    """{z : w.z > 0 and z_i > -floor for all i}.

    Convex, open, contains the positive orthant and excludes nonpositive
    vectors, yet doubling a member near the floor leaves the set.
    """
    wa = np.array(weight_vector(w))

    def member(z):
        return bool(wa @ z > DEFAULT_TOL and np.all(z > -floor))

    return CustomPredicate(member, len(wa), True, "truncated_half_space")
