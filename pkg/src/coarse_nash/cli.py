"""Command-line entry point.

Exit codes: 0 success (or verdicts matching the expected profile), 1 a
check came out differently than expected, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from pathlib import Path

import numpy as np

from coarse_nash import axioms, generate, separation
from coarse_nash import improving as imp
from coarse_nash import io as cnio
from coarse_nash import revealed
from coarse_nash.model import BargainingProblem, InputError
from coarse_nash.rules import CoarseNashRule, parse_rule, parse_set, rule_name
from coarse_nash.solver import coarse_nash

TOL_RANGE = (1e-12, 1e-3)
EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2
DEFAULT_TRIALS = {"validate-set": 1000, "separate": 10_000, "rationalize": 10_000}


class _Mismatch(Exception):
    pass


def _fmt(v: float) -> str:
    return repr(float(v))


def _point(p) -> str:
    return ";".join(_fmt(v) for v in p)


def _write_csv(rows, header, out: str | None) -> None:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def _out_dir(out: str | None) -> Path:
    if not out:
        raise InputError("--out DIR is required for this command")
    path = Path(out)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InputError(f"cannot create output directory {out}: {e.strerror}") from None
    return path


def _tol(value: str) -> float:
    t = float(value)
    if not TOL_RANGE[0] <= t <= TOL_RANGE[1]:
        raise argparse.ArgumentTypeError(f"tolerance must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}]")
    return t


def _positive(value: str) -> int:
    k = int(value)
    if k <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return k


def _load_set(text: str):
    """Improving set from a file or a compact form.

    Besides the forms of ``parse_set`` this accepts the two custom
    counterexample families, ``union_half_spaces:w1;w2`` and
    ``truncated_half_space:w``.
    """
    if Path(text).is_file():
        return cnio.read_set(text)
    kind, _, arg = text.partition(":")
    if kind == "union_half_spaces":
        return imp.union_of_half_spaces([[float(v) for v in part.split(",")] for part in arg.split(";")])
    if kind == "truncated_half_space":
        return imp.truncated_half_space([float(v) for v in arg.split(",")])
    return parse_set(text)


def _problem_files(paths) -> list[Path]:
    files: list[Path] = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            files.extend(sorted(p.glob("*.json")))
        else:
            files.append(p)
    if not files:
        raise InputError("no problem files given")
    return files


def _load_problems(paths) -> list[tuple[str, BargainingProblem]]:
    return [(f.name, cnio.read_problem(f)) for f in _problem_files(paths)]


def _rule_dimension(F) -> int | None:
    A = getattr(F, "A", None)
    n = getattr(A, "n", None) if A is not None else None
    if n is None and hasattr(F, "w"):
        n = len(F.w)
    return n


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.k <= 0:
        raise InputError("empty corpus: --k must be positive")
    out = _out_dir(args.out)
    cfg = generate.GeneratorConfig(ns=(args.n,), symmetric=args.symmetric)
    for P in generate.corpus(args.seed, args.k, args.n, cfg, args.symmetric):
        cnio.write_problem(P, out / f"{P.label}.json")
    return EXIT_OK


def cmd_solve(args) -> int:
    A = _load_set(args.set)
    rows = []
    for name, P in _load_problems(args.problems):
        sol = coarse_nash(A, P, args.tol)
        for i, x in enumerate(sol.chosen):
            rows.append([name, P.label, P.n, i, _point(x)])
    _write_csv(rows, ["problem", "label", "n", "index", "point"], args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    F = parse_rule(args.rule, args.tol)
    n = args.n or _rule_dimension(F)
    corpus = tuple(P for _, P in _load_problems(args.corpus)) if args.corpus else ()
    cfg = generate.GeneratorConfig(ns=(n,) if n else (2, 3), corpus=corpus)
    verdicts = axioms.run_suite(F, cfg, args.trials, args.seed)
    out = _out_dir(args.out)
    rows = []
    for v in verdicts:
        wfile = ""
        if v.witness is not None:
            wfile = f"witness_{v.axiom}.json"
            axioms.save_witness(v.witness, out / wfile)
        rows.append([v.axiom, v.status, v.trials, v.violations, wfile])
    _write_csv(rows, ["axiom", "status", "trials", "violations", "witness_file"], str(out / "verdicts.csv"))
    if args.profile:
        if args.profile not in axioms.PROFILES:
            raise InputError(f"unknown profile {args.profile!r}; known: {', '.join(axioms.PROFILES)}")
        bad = axioms.profile_mismatches(verdicts, axioms.PROFILES[args.profile])
        if bad:
            want = axioms.PROFILES[args.profile][bad[0].axiom]
            raise _Mismatch(f"{bad[0].axiom}: expected {want}, got {bad[0].status}")
    return EXIT_OK


def cmd_validate(args) -> int:
    A = _load_set(args.set)
    rep = imp.validate(A, args.trials, args.seed, args.n, args.tol)
    closure = separation.check_rational_closure(A, seed=args.seed, n=args.n)
    rows = [[v.condition, v.status, v.method, v.trials,
             "" if v.witness is None else "|".join(_point(p) for p in v.witness)] for v in rep.verdicts]
    rows.append(["rational_closure", "PASS" if closure else "FAIL", "sampled", closure.samples,
                 "" if closure.witness is None else _point(closure.witness)])
    _write_csv(rows, ["condition", "status", "method", "trials", "witness"], args.out)
    if not rep.passed or not closure:
        raise _Mismatch(f"{imp.describe(A)} is not an improving set")
    return EXIT_OK


def cmd_separate(args) -> int:
    A = _load_set(args.set)
    n = imp.set_dimension(A, args.n)
    record = {"set": imp.describe(A), "n": n}
    try:
        w = separation.separating_weight(A, args.trials, args.seed, n)
    except separation.NoSeparatingWeightError as e:
        record.update(w=None, verified=False, samples=0, violations=None, error=str(e),
                      certificate=[list(map(float, z)) for z in e.certificate])
        _emit_json(record, args.out)
        return EXIT_MISMATCH
    rep = separation.verify_halfspace_inclusion(A, w, args.trials, args.seed, n)
    record.update(w=list(w), verified=bool(rep), samples=rep.samples, violations=rep.violations)
    _emit_json(record, args.out)
    return EXIT_OK if rep else EXIT_MISMATCH


def _emit_json(record, out):
    text = cnio.dumps(record)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_rationalize(args) -> int:
    F = parse_rule(args.rule, args.tol)
    n = args.n or _rule_dimension(F) or 2
    base = tuple(args.base) if args.base else (1.0,) * n
    if len(base) != n:
        raise InputError(f"--base must have {n} coordinates")
    out = _out_dir(args.out)
    R = revealed.RevealedRelation(F)
    other = tuple(float(v) for v in np.exp(np.linspace(0.5, -0.5, n)))
    verdicts = [
        revealed.check_quasi_transitivity(R, args.trials, args.seed, n),
        revealed.check_monotone_relation(R, args.probes, args.seed, n),
        revealed.check_completeness(R, args.probes, args.seed, n),
    ]
    boundary = F.A if isinstance(F, CoarseNashRule) and imp.is_builtin(F.A) else None
    verdicts.append(revealed.check_base_independence(R, [base, other], args.probes, args.seed, boundary))
    if boundary is not None:
        verdicts.append(revealed.roundtrip_check(F.A, args.probes, args.seed, n, base))
    rows = []
    for v in verdicts:
        witness = "" if v.witness is None else json.dumps(v.witness, sort_keys=True)
        rows.append([v.axiom, v.status, v.trials, "" if v.active is None else v.active, v.skipped, witness])
    _write_csv(rows, ["check", "status", "trials", "active", "skipped", "witness"], str(out / "verdicts.csv"))
    Z, member = revealed.probe_cloud(R, base, args.probes, args.seed)
    _write_csv([[*map(_fmt, z), int(m)] for z, m in zip(Z, member)],
               [f"z{i + 1}" for i in range(n)] + ["member"], str(out / "probes.csv"))
    if any(v.status == "FAIL" for v in verdicts):
        raise _Mismatch(f"{rule_name(F)}: {next(v.axiom for v in verdicts if v.status == 'FAIL')} failed")
    return EXIT_OK


def cmd_compare(args) -> int:
    Fa = parse_rule(args.rule_a, args.tol)
    Fb = parse_rule(args.rule_b, args.tol)
    rows = []
    for name, P in _load_problems(args.corpus):
        a, b = Fa(P).chosen_set, Fb(P).chosen_set
        a_in_b, b_in_a = a <= b, b <= a
        rows.append([name, len(a), len(b), int(a_in_b), int(b_in_a), int(a_in_b != b_in_a)])
    _write_csv(rows, ["problem", "size_a", "size_b", "a_in_b", "b_in_a", "strict"], args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=_positive, default=None, help="sample count (default depends on command)")
    common.add_argument("--tol", type=_tol, default=imp.DEFAULT_TOL)
    common.add_argument("--out", default=None, help="output file or directory")

    p = argparse.ArgumentParser(prog="coarse-nash", description="Coarse Nash bargaining solutions.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a random problem corpus")
    g.add_argument("--k", type=int, default=10)
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--symmetric", action="store_true")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", parents=[common], help="coarse Nash solution of each problem")
    s.add_argument("--set", required=True, help="improving-set file or compact form")
    s.add_argument("problems", nargs="+", help="problem files or directories")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check-axioms", parents=[common], help="sampled axiom suite")
    c.add_argument("--rule", required=True)
    c.add_argument("--profile", default=None, help="; ".join(axioms.PROFILES))
    c.add_argument("--n", type=int, default=None)
    c.add_argument("corpus", nargs="*", help="optional problem files or directories")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("validate-set", parents=[common], help="check the improving-set conditions")
    v.add_argument("set")
    v.add_argument("--n", type=int, default=None)
    v.set_defaults(func=cmd_validate)

    sp = sub.add_parser("separate", parents=[common], help="separating weight of an improving set")
    sp.add_argument("set")
    sp.add_argument("--n", type=int, default=None)
    sp.set_defaults(func=cmd_separate)

    r = sub.add_parser("rationalize", parents=[common], help="revealed-relation checks and probe cloud")
    r.add_argument("--rule", required=True)
    r.add_argument("--n", type=int, default=None)
    r.add_argument("--base", type=float, nargs="+", default=None)
    r.add_argument("--probes", type=_positive, default=1000)
    r.set_defaults(func=cmd_rationalize)

    m = sub.add_parser("compare", parents=[common], help="inclusion between two solutions")
    m.add_argument("--rule-a", required=True)
    m.add_argument("--rule-b", required=True)
    m.add_argument("corpus", nargs="+")
    m.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.trials is None:
        args.trials = DEFAULT_TRIALS.get(args.command, 200)
    try:
        return args.func(args)
    except _Mismatch as e:
        print(f"mismatch: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    except (InputError, imp.InvalidImprovingSetError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
