"""Separating weights for improving sets and the solution refinements they induce."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from coarse_nash import _kernels
from coarse_nash import improving as imp
from coarse_nash.model import BargainingProblem, InputError
from coarse_nash.solver import coarse_nash, weighted_nash

SEPARATION_MARGIN = 1e-6
MAX_LP_SAMPLES = 10_000
HULL_FALLBACK_MAX_N = 3


class NoSeparatingWeightError(ValueError):
    """Sampled members admit no weight with a positive margin.

    ``certificate`` holds sampled members whose nonnegative combination is
    (numerically) nonpositive, i.e. the evidence that co(A) reaches the origin.
    """

    def __init__(self, message: str, certificate: np.ndarray, lp_margin: float, origin_interior: bool | None):
        super().__init__(message)
        self.certificate = certificate
        self.lp_margin = lp_margin
        self.origin_interior = origin_interior


def _unit_rows(Z: np.ndarray) -> np.ndarray:
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def max_margin_weight(Z: np.ndarray):
    """Solve max t s.t. w.z >= t for all rows z, w >= 0, sum w = 1.

    Returns (w, t, dual) with ``dual`` the constraint multipliers.
    """
    m, n = Z.shape
    # variables: w_1..w_n, t ; minimise -t
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-Z, np.ones((m, 1))])
    b_ub = np.zeros(m)
    A_eq = np.zeros((1, n + 1))
    A_eq[0, :n] = 1.0
    bounds = [(0, None)] * n + [(None, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    w = np.clip(res.x[:n], 0.0, None)
    w /= w.sum()
    return w, float(res.x[-1]), -np.asarray(res.ineqlin.marginals)


def origin_interior_to_hull(Z: np.ndarray) -> bool | None:
    """Whether 0 is interior to co(Z); None if the hull is degenerate."""
    try:
        hull = ConvexHull(Z)
    except (QhullError, ValueError):
        return None
    # facets: normal.x + offset <= 0 inside
    return bool(np.all(hull.equations[:, -1] < 0))


def separating_weight(A, samples: int = MAX_LP_SAMPLES, seed: int = 0, n: int | None = None) -> tuple[float, ...]:
    """A weight w in the simplex with A inside {z : w.z > 0}.

    Built-in sets have closed forms. Custom sets go through a max-margin
    linear program over unit-normalised sampled members; the margin must
    reach SEPARATION_MARGIN.
    """
    n = imp.set_dimension(A, n)
    if isinstance(A, imp.HalfSpace):
        return A.w
    if isinstance(A, (imp.Orthant, imp.NashThreshold)):
        return imp.uniform_weights(n)
    if isinstance(A, imp.ConeIntersection):
        return imp.normalized(np.mean(np.array(A.W), axis=0))
    if samples < 1:
        raise InputError("samples must be positive")
    samples = min(samples, MAX_LP_SAMPLES)
    Z = imp.sample_members(A, samples, np.random.default_rng(seed), n)
    if len(Z) == 0:
        raise NoSeparatingWeightError("no members sampled; cannot separate", Z, float("nan"), None)
    U = _unit_rows(Z)
    w, t, dual = max_margin_weight(U)
    if t >= SEPARATION_MARGIN:
        return imp.normalized(w)
    interior = origin_interior_to_hull(U) if n <= HULL_FALLBACK_MAX_N else None
    support = np.argsort(-dual)[: n + 1]
    cert = Z[support[dual[support] > 0]]
    raise NoSeparatingWeightError(
        f"no separating weight found (best margin {t:.3g}); set is likely not an improving set",
        cert, t, interior,
    )


@dataclass(frozen=True)
class InclusionReport:
    """Outcome of a sampled inclusion test; truthy iff no violations."""

    samples: int
    violations: int
    witness: tuple[float, ...] | None = None

    def __bool__(self) -> bool:
        return self.samples > 0 and self.violations == 0


def _scores(Z: np.ndarray, w: Sequence[float]) -> np.ndarray:
    return _kernels.sorted_scores(Z, np.array([w], dtype=np.float64))[:, 0]


def verify_halfspace_inclusion(A, w: Sequence[float], trials: int = 10_000, seed: int = 0,
                               n: int | None = None) -> InclusionReport:
    """Every sampled member z of A has w.z > 0."""
    w = imp.weight_vector(w)
    n = imp.set_dimension(A, n if n is not None else len(w))
    Z = imp.sample_members(A, trials, np.random.default_rng(seed), n)
    bad = _scores(Z, w) <= 0.0
    witness = tuple(float(v) for v in Z[bad][0]) if bad.any() else None
    return InclusionReport(len(Z), int(bad.sum()), witness)


def check_inclusion_chain(A, w: Sequence[float], trials: int = 10_000, seed: int = 0,
                          n: int | None = None) -> InclusionReport:
    """orthant ⊆ A ⊆ {w.z > 0} on sampled points of R^n."""
    w = imp.weight_vector(w)
    n = imp.set_dimension(A, n if n is not None else len(w))
    Z = imp.sample_directions(np.random.default_rng(seed), trials, n)
    in_orthant = Z.min(axis=1) > imp.DEFAULT_TOL
    in_A = imp.contains_many(A, Z)
    in_half = _scores(Z, w) > 0.0
    bad = (in_orthant & ~in_A) | (in_A & ~in_half)
    witness = tuple(float(v) for v in Z[bad][0]) if bad.any() else None
    return InclusionReport(trials, int(bad.sum()), witness)


@dataclass
class RefinementReport:
    problems: int = 0
    included: int = 0
    strict: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.included == self.problems

    @property
    def strict_frequency(self) -> float:
        return self.strict / self.problems if self.problems else 0.0


def verify_refinement(A, w: Sequence[float], problems: Sequence[BargainingProblem],
                      tol: float = imp.DEFAULT_TOL) -> RefinementReport:
    """weighted_nash(w, P) ⊆ coarse_nash(A, P) on each problem, with strictness counts."""
    rep = RefinementReport()
    for P in problems:
        fine = weighted_nash(w, P, tol).chosen_set
        coarse = coarse_nash(A, P, tol).chosen_set
        rep.problems += 1
        if fine <= coarse:
            rep.included += 1
            rep.strict += fine != coarse
        else:
            rep.failures.append((P, sorted(fine - coarse)))
    return rep


@dataclass(frozen=True)
class SumBoundReport:
    status: str  # PASS | FAIL | SKIPPED
    samples: int = 0
    witness: tuple[float, ...] | None = None

    def __bool__(self) -> bool:
        return self.status == "PASS"


def symmetric_sum_bound(A, trials: int = 10_000, seed: int = 0, n: int | None = None) -> SumBoundReport:
    """Members of a symmetric improving set have positive coordinate sum."""
    n = imp.set_dimension(A, n)
    if not imp.is_symmetric_set(A, n=n):
        return SumBoundReport("SKIPPED")
    Z = imp.sample_members(A, trials, np.random.default_rng(seed), n)
    bad = _scores(Z, np.ones(n)) <= 0.0
    if bad.any():
        return SumBoundReport("FAIL", len(Z), tuple(float(v) for v in Z[bad][0]))
    return SumBoundReport("PASS" if len(Z) else "SKIPPED", len(Z))


def check_rational_closure(A, pairs: int = 100, max_multiplier: int = 5, seed: int = 0,
                           n: int | None = None) -> InclusionReport:
    """m1*z1 + m2*z2 stays in A for sampled members and integers 1 <= m1, m2 <= max_multiplier.

    The witness is (m1, m2, *z1, *z2) for the first failure found.
    """
    n = imp.set_dimension(A, n)
    M = imp.sample_members(A, 2 * pairs, np.random.default_rng(seed), n)
    k = len(M) // 2
    Z1, Z2 = M[:k], M[k: 2 * k]
    violations = 0
    witness = None
    for m1 in range(1, max_multiplier + 1):
        for m2 in range(1, max_multiplier + 1):
            bad = ~imp.contains_many(A, m1 * Z1 + m2 * Z2)
            violations += int(bad.sum())
            if witness is None and bad.any():
                j = int(np.argmax(bad))
                witness = (float(m1), float(m2), *map(float, Z1[j]), *map(float, Z2[j]))
    return InclusionReport(k * max_multiplier**2, violations, witness)
