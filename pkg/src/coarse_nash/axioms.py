"""Sampled checks of the bargaining axioms for arbitrary solutions.

Every check takes a solution ``F`` (BargainingProblem -> SolutionSet) and
concrete problems, and returns an :class:`AxiomVerdict`. A FAIL carries a
witness record with the offending problems and points; it can be replayed
with :func:`replay_witness`.

"F(S') ∩ S" always means the chosen points of S' that lie in cmp(S).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from coarse_nash import generate
from coarse_nash.io import dumps, problem_from_record, problem_to_record
from coarse_nash.model import (
    MAX_PERMUTATION_PLAYERS,
    BargainingProblem,
    InputError,
    all_permutations,
    as_point,
    contains_many,
    hausdorff_approx,
    is_symmetric_problem,
    permute,
    scale_point,
    scale_problem,
    strictly_dominated_within,
    union_problem,
)
from coarse_nash.rules import rule_name

Solution = Callable[[BargainingProblem], "SolutionSet"]  # noqa: F821

AXIOMS = (
    "arrow",
    "chernoff",
    "dual_chernoff",
    "weak_dual_chernoff",
    "weak_arrow",
    "iie",
    "efficiency",
    "anonymity",
    "scale_invariance",
)


@dataclass
class AxiomVerdict:
    axiom: str
    status: str  # PASS | FAIL | SKIPPED
    trials: int = 1
    violations: int = 0
    witness: dict | None = None
    skipped: int = 0
    active: int | None = None  # instances where the hypothesis held, when tracked

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


def _pts(points) -> list[list[float]]:
    return [list(p) for p in sorted(points)]


def _fail(axiom, problems, points, detail, **extra) -> AxiomVerdict:
    witness = {
        "axiom": axiom,
        "problems": [problem_to_record(P) for P in problems],
        "points": _pts(points),
        "detail": detail,
    }
    witness.update(extra)
    return AxiomVerdict(axiom, "FAIL", 1, 1, witness)


def _pass(axiom) -> AxiomVerdict:
    return AxiomVerdict(axiom, "PASS")


def _restrict(chosen, P: BargainingProblem) -> set:
    """Chosen points lying in cmp(P)."""
    if not chosen:
        return set()
    inside = contains_many(P, np.array(chosen))
    return {x for x, k in zip(chosen, inside) if k}


def _require_nested(S: BargainingProblem, Sp: BargainingProblem):
    if S.n != Sp.n:
        raise InputError(f"dimension mismatch: {S.n} vs {Sp.n}")
    if not contains_many(Sp, np.array(S.pool)).all():
        raise InputError("problems are not nested: cmp(S) is not inside cmp(S')")


# --------------------------------------------------------------------------
# single-instance checks
# --------------------------------------------------------------------------


def check_arrow(F, S, Sp) -> AxiomVerdict:
    """Nonempty F(S') ∩ S forces F(S) = F(S') ∩ S."""
    _require_nested(S, Sp)
    inter = _restrict(F(Sp).chosen, S)
    FS = F(S).chosen_set
    if inter and FS != inter:
        return _fail("arrow", [S, Sp], FS.symmetric_difference(inter), "F(S) != F(S') ∩ S")
    return _pass("arrow")


def check_chernoff(F, S, Sp) -> AxiomVerdict:
    _require_nested(S, Sp)
    inter = _restrict(F(Sp).chosen, S)
    missing = inter - F(S).chosen_set
    if missing:
        return _fail("chernoff", [S, Sp], missing, "chosen in S' and feasible in S, but not chosen in S")
    return _pass("chernoff")


def check_dual_chernoff(F, S, Sp) -> AxiomVerdict:
    _require_nested(S, Sp)
    inter = _restrict(F(Sp).chosen, S)
    if not inter:
        return _pass("dual_chernoff")
    evicted = F(S).chosen_set - inter
    if evicted:
        return _fail("dual_chernoff", [S, Sp], evicted,
                     "chosen in S but dropped in S' while other points of S stay chosen")
    return _pass("dual_chernoff")


def check_weak_dual_chernoff(F, S, T) -> AxiomVerdict:
    common = F(S).chosen_set & F(T).chosen_set
    missing = common - F(union_problem(S, T)).chosen_set
    if missing:
        return _fail("weak_dual_chernoff", [S, T], missing, "chosen in S and T but not in S ∪ T")
    return _pass("weak_dual_chernoff")


def check_weak_arrow(F, S, T) -> AxiomVerdict:
    """F(S) ∩ F(T) = F(S ∪ T) ∩ S ∩ T."""
    if S.n != T.n:
        raise InputError(f"dimension mismatch: {S.n} vs {T.n}")
    lhs = F(S).chosen_set & F(T).chosen_set
    rhs = _restrict(tuple(_restrict(F(union_problem(S, T)).chosen, S)), T)
    if lhs != rhs:
        return _fail("weak_arrow", [S, T], lhs.symmetric_difference(rhs), "F(S) ∩ F(T) != F(S ∪ T) ∩ S ∩ T")
    return _pass("weak_arrow")


def check_iie(F, S, Sp) -> AxiomVerdict:
    """If F(S') ⊆ S then F(S) ⊆ F(S')."""
    _require_nested(S, Sp)
    FSp = F(Sp).chosen
    if len(_restrict(FSp, S)) < len(FSp):
        return _pass("iie")
    missing = F(S).chosen_set - set(FSp)
    if missing:
        return _fail("iie", [S, Sp], missing, "F(S') ⊆ S but some point of F(S) is not chosen in S'")
    return _pass("iie")


def check_efficiency(F, S) -> AxiomVerdict:
    sol = F(S)
    dominators = tuple(set(S.generators) | set(sol.candidate_pool))
    beaten = [x for x in sol.chosen if strictly_dominated_within(dominators, x)]
    if beaten:
        return _fail("efficiency", [S], beaten, "chosen point strictly dominated by a feasible point")
    chosen = np.array(sol.chosen)
    left_out = [
        x for x in sol.candidate_pool
        if x not in sol.chosen_set and np.any(np.all(np.asarray(x) >= chosen, axis=1))
    ]
    if left_out:
        return _fail("efficiency", [S], left_out, "point weakly above a chosen point is not chosen")
    return _pass("efficiency")


def check_anonymity(F, S) -> AxiomVerdict:
    if S.n > MAX_PERMUTATION_PLAYERS or not is_symmetric_problem(S):
        return AxiomVerdict("anonymity", "SKIPPED", 1, skipped=1)
    chosen = F(S).chosen_set
    perms = all_permutations(S.n)
    missing = {permute(x, p) for x in chosen for p in perms} - chosen
    if missing:
        return _fail("anonymity", [S], missing, "permutation of a chosen point is not chosen")
    return _pass("anonymity")


def check_scale_invariance(F, S, a: Sequence[float]) -> AxiomVerdict:
    a = as_point(a, S.n)
    scaled = F(scale_problem(a, S)).chosen_set
    expected = {scale_point(a, x) for x in F(S).chosen}
    if scaled != expected:
        return _fail("scale_invariance", [S], scaled.symmetric_difference(expected),
                     "F(a*S) != a*F(S)", a=list(a))
    return _pass("scale_invariance")


# --------------------------------------------------------------------------
# decomposition of the weak Arrow axiom
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    weak_arrow: bool  # on (S, T), (S, S ∪ T) and (T, S ∪ T)
    chernoff: bool  # on (S, S ∪ T) and (T, S ∪ T)
    weak_dual_chernoff: bool  # on (S, T)
    weak_arrow_pair: bool  # on (S, T) alone

    @property
    def consistent(self) -> bool:
        return self.weak_arrow == (self.chernoff and self.weak_dual_chernoff)


def check_decomposition(F, S, T) -> Decomposition:
    """Evaluate weak Arrow against Chernoff plus weak dual Chernoff on one family.

    Weak Arrow on a nested pair (S, S ∪ T) is exactly Chernoff on that pair,
    so the family {(S,T), (S,S∪T), (T,S∪T)} makes the two sides comparable
    instance by instance.
    """
    U = union_problem(S, T)
    wa_st = check_weak_arrow(F, S, T).passed
    wa = wa_st and check_weak_arrow(F, S, U).passed and check_weak_arrow(F, T, U).passed
    ch = check_chernoff(F, S, U).passed and check_chernoff(F, T, U).passed
    wd = check_weak_dual_chernoff(F, S, T).passed
    return Decomposition(wa, ch, wd, wa_st)


# --------------------------------------------------------------------------
# continuity smoke test
# --------------------------------------------------------------------------


def continuity_smoke(F, S: BargainingProblem, steps: int = 8, seed: int = 0, tol: float = 1e-6) -> AxiomVerdict:
    """Shrinking multiplicative perturbations S^k -> S; limits of chosen points must be chosen.

    Generator g is perturbed to g * exp(u_g / 2^k) with fixed u_g in [-1, 1]^n.
    A generator whose perturbed copy is chosen at the last two steps is treated
    as the limit of a chosen sequence.
    """
    rng = np.random.default_rng(seed)
    gens = np.array(S.pool)
    U = rng.uniform(-1, 1, size=gens.shape)
    tracked = None
    dist = np.inf
    for k in range(steps - 1, steps + 1):
        pert = gens * np.exp(U / 2.0**k)
        Sk = BargainingProblem(S.n, tuple(tuple(float(v) for v in p) for p in pert), S.label)
        dist = hausdorff_approx(Sk, S, max(1e-3, float(gens.max()) / 200))
        chosen = F(Sk).chosen_set
        picked = {i for i, p in enumerate(pert) if tuple(float(v) for v in p) in chosen}
        tracked = picked if tracked is None else tracked & picked
    base = F(S).chosen
    base_arr = np.array(base)
    missing = []
    for i in sorted(tracked or ()):
        gap = np.abs(base_arr - gens[i]).max(axis=1).min()
        if gap > tol:
            missing.append(tuple(gens[i]))
    if missing:
        return _fail("continuity", [S], missing, f"limit of chosen points not chosen (hausdorff {dist:.3g})")
    return _pass("continuity")


# --------------------------------------------------------------------------
# suites
# --------------------------------------------------------------------------


def _sample_and_check(axiom, F, rng, cfg):
    if axiom in ("arrow", "chernoff", "dual_chernoff", "iie"):
        S, Sp = generate.nested_pair(rng, cfg)
        return CHECKS[axiom](F, S, Sp)
    if axiom in ("weak_dual_chernoff", "weak_arrow"):
        S, T = generate.overlapping_pair(rng, cfg)
        return CHECKS[axiom](F, S, T)
    if axiom == "efficiency":
        return check_efficiency(F, generate.random_problem(rng, cfg))
    if axiom == "anonymity":
        return check_anonymity(F, generate.random_problem(rng, cfg, symmetric=True))
    if axiom == "scale_invariance":
        S = generate.random_problem(rng, cfg)
        return check_scale_invariance(F, S, generate.random_scale(rng, S.n))
    raise KeyError(axiom)


CHECKS = {
    "arrow": check_arrow,
    "chernoff": check_chernoff,
    "dual_chernoff": check_dual_chernoff,
    "weak_dual_chernoff": check_weak_dual_chernoff,
    "weak_arrow": check_weak_arrow,
    "iie": check_iie,
    "efficiency": check_efficiency,
    "anonymity": check_anonymity,
    "scale_invariance": check_scale_invariance,
}


def run_axiom(F, axiom: str, cfg: generate.GeneratorConfig, trials: int, seed: int) -> AxiomVerdict:
    """``trials`` sampled instances of one axiom; the first violation is the witness."""
    rng = np.random.default_rng([seed, AXIOMS.index(axiom)])
    violations = skipped = 0
    witness = None
    for t in range(trials):
        v = _sample_and_check(axiom, F, rng, cfg)
        if v.status == "SKIPPED":
            skipped += 1
        elif v.status == "FAIL":
            violations += 1
            if witness is None:
                witness = dict(v.witness, trial=t, seed=seed, rule=rule_name(F))
    if violations:
        status = "FAIL"
    elif skipped == trials:
        status = "SKIPPED"
    else:
        status = "PASS"
    return AxiomVerdict(axiom, status, trials, violations, witness, skipped)


def run_suite(F, cfg: generate.GeneratorConfig | None = None, trials: int = 200, seed: int = 0,
              axioms: Sequence[str] = AXIOMS) -> list[AxiomVerdict]:
    cfg = cfg or generate.GeneratorConfig()
    return [run_axiom(F, a, cfg, trials, seed) for a in axioms]


def replay_witness(F, witness: dict) -> AxiomVerdict:
    """Re-run the check recorded in a witness on its stored problems."""
    axiom = witness["axiom"]
    problems = [problem_from_record(r) for r in witness["problems"]]
    if axiom == "scale_invariance":
        return check_scale_invariance(F, problems[0], witness["a"])
    return CHECKS[axiom](F, *problems)


def save_witness(witness: dict, path) -> None:
    Path(path).write_text(dumps(witness))


def load_witness(path) -> dict:
    return json.loads(Path(path).read_text())


# --------------------------------------------------------------------------
# expectation profiles
# --------------------------------------------------------------------------

_CORE = {"weak_arrow": "PASS", "chernoff": "PASS", "weak_dual_chernoff": "PASS", "iie": "PASS",
         "efficiency": "PASS", "scale_invariance": "PASS"}

PROFILES: dict[str, dict[str, str]] = {
    # any coarse Nash solution: Arrow and dual Chernoff may go either way
    "coarse": {**_CORE, "arrow": "ANY", "dual_chernoff": "ANY", "anonymity": "ANY"},
    # coarse Nash from a permutation-invariant improving set
    "coarse-symmetric": {**_CORE, "arrow": "ANY", "dual_chernoff": "ANY", "anonymity": "PASS"},
    # weighted Nash: everything except anonymity
    "weighted": {**{a: "PASS" for a in AXIOMS}, "anonymity": "ANY"},
    "nash": {a: "PASS" for a in AXIOMS},
}


def profile_mismatches(verdicts: Sequence[AxiomVerdict], profile: dict[str, str]) -> list[AxiomVerdict]:
    bad = []
    for v in verdicts:
        want = profile.get(v.axiom, "ANY")
        if v.status == "SKIPPED" or want == "ANY":
            continue
        if v.status != want:
            bad.append(v)
    return bad
