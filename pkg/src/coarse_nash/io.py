"""JSON records for problems, improving sets and axiom witnesses."""

from __future__ import annotations

import json
from pathlib import Path

from coarse_nash import improving as imp
from coarse_nash.model import BargainingProblem, InputError

SCHEMA_VERSION = 1


def problem_to_record(P: BargainingProblem) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "n": P.n,
        "label": P.label,
        "generators": [list(g) for g in sorted(P.generators)],
    }


def problem_from_record(rec: dict) -> BargainingProblem:
    if not isinstance(rec, dict):
        raise InputError("problem record must be an object")
    for key in ("schema_version", "n", "generators"):
        if key not in rec:
            raise InputError(f"problem record missing field '{key}'")
    if rec["schema_version"] != SCHEMA_VERSION:
        raise InputError(f"field 'schema_version': unsupported value {rec['schema_version']!r}")
    n = rec["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise InputError("field 'n' must be an integer")
    gens = rec["generators"]
    if not isinstance(gens, list) or not gens:
        raise InputError("field 'generators' must be a nonempty list")
    for g in gens:
        if not isinstance(g, list) or len(g) != n or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in g
        ):
            raise InputError(f"field 'generators': entry {g!r} is not a list of {n} numbers")
    label = rec.get("label", "")
    if not isinstance(label, str):
        raise InputError("field 'label' must be a string")
    return BargainingProblem(n, tuple(tuple(float(v) for v in g) for g in gens), label)


def dumps(rec: dict) -> str:
    return json.dumps(rec, indent=2, sort_keys=True) + "\n"


def write_problem(P: BargainingProblem, path) -> None:
    Path(path).write_text(dumps(problem_to_record(P)))


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e.msg})") from None


def read_problem(path) -> BargainingProblem:
    try:
        return problem_from_record(_load_json(path))
    except InputError as e:
        raise InputError(f"{path}: {e}") from None


def set_to_record(A) -> dict:
    rec = {"schema_version": SCHEMA_VERSION, "variant": A.name}
    if isinstance(A, imp.HalfSpace):
        rec["w"] = list(A.w)
    elif isinstance(A, imp.ConeIntersection):
        rec["W"] = [list(w) for w in A.W]
    elif isinstance(A, imp.NashThreshold):
        rec["epsilon"] = A.epsilon
    elif isinstance(A, imp.CustomPredicate):
        raise InputError("custom predicates are code-level only and cannot be serialized")
    if getattr(A, "n", None) is not None and isinstance(A, (imp.Orthant, imp.NashThreshold)):
        rec["n"] = A.n
    return rec


def set_from_record(rec: dict):
    if not isinstance(rec, dict):
        raise InputError("improving-set record must be an object")
    if rec.get("schema_version") != SCHEMA_VERSION:
        raise InputError(f"field 'schema_version': unsupported value {rec.get('schema_version')!r}")
    variant = rec.get("variant")
    n = rec.get("n")
    try:
        if variant == "orthant":
            return imp.Orthant(n)
        if variant == "half_space":
            if "w" not in rec:
                raise InputError("field 'w' is required for half_space")
            return imp.HalfSpace(tuple(rec["w"]))
        if variant == "cone":
            if "W" not in rec:
                raise InputError("field 'W' is required for cone")
            return imp.ConeIntersection(tuple(tuple(w) for w in rec["W"]))
        if variant == "nash_threshold":
            if "epsilon" not in rec:
                raise InputError("field 'epsilon' is required for nash_threshold")
            return imp.NashThreshold(rec["epsilon"], n)
    except (TypeError, ValueError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"field for variant {variant!r}: {e}") from None
    raise InputError(f"field 'variant': unknown value {variant!r}")


def read_set(path):
    try:
        return set_from_record(_load_json(path))
    except InputError as e:
        raise InputError(f"{path}: {e}") from None


def write_set(A, path) -> None:
    Path(path).write_text(dumps(set_to_record(A)))
