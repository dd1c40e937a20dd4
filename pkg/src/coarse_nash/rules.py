"""Named bargaining solutions, including deliberately broken ones for the axiom checks.

A solution is any callable taking a BargainingProblem and returning a
SolutionSet. The classes here add a stable ``name`` for reports and a parser
for the compact text form used on the command line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from coarse_nash import improving as imp
from coarse_nash.model import BargainingProblem, InputError
from coarse_nash.solver import SolutionSet, coarse_nash, nash, weak_pareto, weighted_nash


@dataclass(frozen=True)
class CoarseNashRule:
    A: object
    tol: float = imp.DEFAULT_TOL

    @property
    def name(self) -> str:
        return f"coarse:{imp.describe(self.A)}"

    def __call__(self, P: BargainingProblem) -> SolutionSet:
        return coarse_nash(self.A, P, self.tol)


@dataclass(frozen=True)
class WeightedNashRule:
    w: tuple[float, ...]
    tol: float = imp.DEFAULT_TOL

    @property
    def name(self) -> str:
        return "weighted:" + ",".join(f"{v:g}" for v in self.w)

    def __call__(self, P):
        return weighted_nash(self.w, P, self.tol)


@dataclass(frozen=True)
class NashRule:
    tol: float = imp.DEFAULT_TOL
    name = "nash"

    def __call__(self, P):
        return nash(P, self.tol)


@dataclass(frozen=True)
class WeakParetoRule:
    tol: float = imp.DEFAULT_TOL
    name = "weak_pareto"

    def __call__(self, P):
        return weak_pareto(P, self.tol)


# --------------------------------------------------------------------------
# adversarial rules
# --------------------------------------------------------------------------


def _argmax(points, key):
    vals = [key(p) for p in points]
    best = max(vals)
    return tuple(p for p, v in zip(points, vals) if v == best)


@dataclass(frozen=True)
class SwitchRule:
    """Max second coordinate, but max first coordinate once the pool has 3+ points."""

    name = "adv:switch"

    def __call__(self, P):
        idx = 0 if len(P.pool) >= 3 else 1
        return SolutionSet(_argmax(P.pool, lambda x: x[idx]), P.pool)


@dataclass(frozen=True)
class ParityRule:
    """Max first coordinate on even-sized pools, max second on odd-sized ones."""

    name = "adv:parity"

    def __call__(self, P):
        idx = 0 if len(P.pool) % 2 == 0 else 1
        return SolutionSet(_argmax(P.pool, lambda x: x[idx]), P.pool)


@dataclass(frozen=True)
class MinLogSumRule:
    """Minimiser of the Nash product over all generators (dominated ones included)."""

    name = "adv:min_log_sum"

    def __call__(self, P):
        pool = P.generators
        return SolutionSet(_argmax(pool, lambda x: -math.fsum(math.log(v) for v in x)), pool)


@dataclass(frozen=True)
class CutoffRule:
    """Points whose first coordinate exceeds an absolute cutoff, else the whole pool."""

    cutoff: float = 1.0
    name = "adv:cutoff"

    def __call__(self, P):
        chosen = tuple(x for x in P.pool if x[0] > self.cutoff) or P.pool
        return SolutionSet(chosen, P.pool)


@dataclass(frozen=True)
class UtilitarianRule:
    """Maximiser of the plain utility sum; not scale invariant."""

    name = "adv:utilitarian"

    def __call__(self, P):
        return SolutionSet(_argmax(P.pool, lambda x: math.fsum(x)), P.pool)


@dataclass(frozen=True)
class BandRule:
    """y beats x if y >> x or their log Nash products differ by an amount in (lo, hi).

    The band makes the strict relation intransitive: two steps of 0.3 give a
    gap of 0.6, outside the band.
    """

    lo: float = 0.1
    hi: float = 0.5
    name = "adv:band"

    def __call__(self, P):
        L = np.log(P.pool_array())
        s = L.sum(axis=1)
        keep = []
        for i in range(len(L)):
            beaten = False
            for j in range(len(L)):
                gap = s[j] - s[i]
                if np.all(L[j] > L[i]) or self.lo < gap < self.hi:
                    beaten = True
                    break
            keep.append(not beaten)
        return SolutionSet(tuple(x for x, k in zip(P.pool, keep) if k), P.pool)


ADVERSARIAL = {
    "switch": SwitchRule,
    "parity": ParityRule,
    "min_log_sum": MinLogSumRule,
    "cutoff": CutoffRule,
    "utilitarian": UtilitarianRule,
    "band": BandRule,
}


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None


def parse_set(text: str):
    """Improving set from its compact form, e.g. ``nash_threshold:0.1``."""
    kind, _, arg = text.partition(":")
    if kind == "orthant":
        return imp.Orthant()
    if kind == "half_space":
        return imp.HalfSpace(_floats(arg))
    if kind == "cone":
        return imp.ConeIntersection(tuple(_floats(part) for part in arg.split(";")))
    if kind == "nash_threshold":
        try:
            return imp.NashThreshold(float(arg))
        except ValueError:
            raise InputError(f"bad epsilon {arg!r}") from None
    raise InputError(f"unknown improving set {text!r}")


def parse_rule(text: str, tol: float = imp.DEFAULT_TOL):
    """Solution from its compact form.

    Forms: ``nash``, ``weak_pareto``, ``weighted:0.7,0.3``, ``coarse:<set>``
    with ``<set>`` as in :func:`parse_set`, and ``adv:<name>`` for the
    adversarial rules.
    """
    text = text.strip()
    if text == "nash":
        return NashRule(tol)
    if text == "weak_pareto":
        return WeakParetoRule(tol)
    kind, _, arg = text.partition(":")
    if kind == "weighted":
        return WeightedNashRule(imp.weight_vector(_floats(arg)), tol)
    if kind == "coarse":
        return CoarseNashRule(parse_set(arg), tol)
    if kind == "adv" and arg in ADVERSARIAL:
        return ADVERSARIAL[arg]()
    raise InputError(f"unknown solution {text!r}")


def rule_name(F) -> str:
    return getattr(F, "name", getattr(F, "__name__", repr(F)))
