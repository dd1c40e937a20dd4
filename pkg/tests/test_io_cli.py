import csv
import json

import pytest

from coarse_nash import improving as imp
from coarse_nash import io as cnio
from coarse_nash.cli import main
from coarse_nash.model import BargainingProblem, InputError, is_symmetric_problem
from coarse_nash.rules import parse_rule, parse_set

THREE = {"schema_version": 1, "n": 2, "generators": [[1, 2], [2, 1], [1.5, 1.5]]}


def _rows(path):
    with open(path) as f:
        return list(csv.DictReader(f))


@pytest.fixture
def problem(tmp_path):
    p = tmp_path / "three.json"
    p.write_text(json.dumps(THREE))
    return p


def test_problem_roundtrip(tmp_path):
    prob = BargainingProblem.of([(2, 1), (1, 2)], "x")
    cnio.write_problem(prob, tmp_path / "p.json")
    assert cnio.read_problem(tmp_path / "p.json") == prob
    rec = json.loads((tmp_path / "p.json").read_text())
    assert rec["generators"] == [[1.0, 2.0], [2.0, 1.0]]


@pytest.mark.parametrize("A", [imp.Orthant(), imp.HalfSpace((0.7, 0.3)), imp.NashThreshold(0.1, 3),
                               imp.ConeIntersection(((0.3, 0.7), (0.7, 0.3)))], ids=imp.describe)
def test_set_roundtrip(A, tmp_path):
    cnio.write_set(A, tmp_path / "a.json")
    assert cnio.read_set(tmp_path / "a.json") == A


@pytest.mark.parametrize("rec,field", [
    ({"n": 2, "generators": [[1, 2]]}, "schema_version"),
    ({"schema_version": 1, "n": 2, "generators": [[1, "a"]]}, "generators"),
    ({"schema_version": 1, "n": "2", "generators": [[1, 2]]}, "'n'"),
    ({"schema_version": 1, "n": 2, "generators": []}, "generators"),
])
def test_malformed_problem_names_field(rec, field):
    with pytest.raises(InputError, match=field):
        cnio.problem_from_record(rec)


def test_malformed_set():
    with pytest.raises(InputError, match="variant"):
        cnio.set_from_record({"schema_version": 1, "variant": "ball"})
    with pytest.raises(InputError, match="epsilon"):
        cnio.set_from_record({"schema_version": 1, "variant": "nash_threshold"})
    with pytest.raises(InputError):
        cnio.set_to_record(imp.union_of_half_spaces([(0.3, 0.7), (0.7, 0.3)]))


def test_parsers():
    assert parse_set("cone:0.3,0.7;0.7,0.3") == imp.ConeIntersection(((0.3, 0.7), (0.7, 0.3)))
    assert parse_rule("weighted:0.7,0.3").w == (0.7, 0.3)
    assert parse_rule("adv:parity").name == "adv:parity"
    for bad in ("ball", "coarse:ball", "weighted:a,b", "adv:nope"):
        with pytest.raises(InputError):
            parse_rule(bad)


def test_gen(tmp_path):
    assert main(["gen", "--seed", "7", "--k", "3", "--n", "2", "--out", str(tmp_path / "a")]) == 0
    assert main(["gen", "--seed", "7", "--k", "3", "--n", "2", "--out", str(tmp_path / "b")]) == 0
    files = sorted((tmp_path / "a").iterdir())
    assert len(files) == 3
    for f in files:
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()
    assert main(["gen", "--symmetric", "--k", "4", "--n", "2", "--out", str(tmp_path / "s")]) == 0
    assert all(is_symmetric_problem(cnio.read_problem(f)) for f in (tmp_path / "s").iterdir())
    assert main(["gen", "--k", "0", "--out", str(tmp_path / "e")]) == 2


def test_solve(problem, tmp_path):
    out = tmp_path / "nt.csv"
    assert main(["solve", "--set", "nash_threshold:0.05", str(problem), "--out", str(out)]) == 0
    rows = _rows(out)
    assert [r["point"] for r in rows] == ["1.5;1.5"]
    assert main(["solve", "--set", "orthant", str(problem), "--out", str(out)]) == 0
    assert len(_rows(out)) == 3
    setfile = tmp_path / "set.json"
    cnio.write_set(imp.NashThreshold(0.05), setfile)
    assert main(["solve", "--set", str(setfile), str(problem), "--out", str(out)]) == 0
    assert len(_rows(out)) == 1


def test_solve_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema_version": 1, "n": 2, "generators": [[1, "a"]]}))
    assert main(["solve", "--set", "orthant", str(bad)]) == 2
    assert "generators" in capsys.readouterr().err
    assert main(["solve", "--set", "orthant", str(tmp_path / "missing.json")]) == 2


def test_check_axioms_profiles(tmp_path, capsys):
    out = tmp_path / "nt"
    assert main(["check-axioms", "--rule", "coarse:nash_threshold:0.1", "--profile", "coarse",
                 "--out", str(out)]) == 0
    rows = {r["axiom"]: r for r in _rows(out / "verdicts.csv")}
    assert rows["arrow"]["status"] == "FAIL"
    witness = json.loads((out / rows["arrow"]["witness_file"]).read_text())
    assert witness["axiom"] == "arrow" and len(witness["problems"]) == 2
    assert main(["check-axioms", "--rule", "nash", "--profile", "nash", "--out", str(tmp_path / "n")]) == 0
    assert main(["check-axioms", "--rule", "coarse:nash_threshold:0.1", "--profile", "nash",
                 "--out", str(tmp_path / "m")]) == 1
    assert "arrow" in capsys.readouterr().err
    assert main(["check-axioms", "--rule", "nash", "--profile", "nope", "--out", str(tmp_path / "x")]) == 2


def test_check_axioms_on_corpus(tmp_path):
    corpus = tmp_path / "corpus"
    main(["gen", "--k", "5", "--n", "2", "--out", str(corpus)])
    assert main(["check-axioms", "--rule", "nash", "--trials", "20", "--out", str(tmp_path / "o"), str(corpus)]) == 0


def test_validate_and_separate(tmp_path):
    assert main(["validate-set", "orthant", "--out", str(tmp_path / "v.csv")]) == 0
    assert main(["validate-set", "union_half_spaces:0.3,0.7;0.7,0.3", "--out", str(tmp_path / "u.csv")]) == 1
    rows = {r["condition"]: r for r in _rows(tmp_path / "u.csv")}
    assert rows["ii"]["status"] == "FAIL" and "|" in rows["ii"]["witness"]
    assert main(["validate-set", "truncated_half_space:0.5,0.5", "--out", str(tmp_path / "t.csv")]) == 1
    rows = {r["condition"]: r for r in _rows(tmp_path / "t.csv")}
    assert rows["rational_closure"]["status"] == "FAIL"

    assert main(["separate", "cone:0.3,0.7;0.7,0.3", "--out", str(tmp_path / "s.json")]) == 0
    rec = json.loads((tmp_path / "s.json").read_text())
    assert rec["w"] == [0.5, 0.5] and rec["verified"] and rec["violations"] == 0 and rec["samples"] == 10_000
    assert main(["separate", "union_half_spaces:0.3,0.7;0.7,0.3", "--out", str(tmp_path / "f.json")]) == 1
    assert json.loads((tmp_path / "f.json").read_text())["verified"] is False


def test_rationalize(tmp_path):
    out = tmp_path / "r"
    assert main(["rationalize", "--rule", "coarse:nash_threshold:0.1", "--trials", "500", "--probes", "200",
                 "--out", str(out)]) == 0
    checks = {r["check"]: r["status"] for r in _rows(out / "verdicts.csv")}
    assert checks["roundtrip"] == "PASS" and checks["quasi_transitivity"] == "PASS"
    probes = _rows(out / "probes.csv")
    assert len(probes) == 200 and set(probes[0]) == {"z1", "z2", "member"}
    assert main(["rationalize", "--rule", "adv:band", "--trials", "2000", "--probes", "100",
                 "--out", str(tmp_path / "b")]) == 1


def test_compare(tmp_path):
    corpus = tmp_path / "c"
    main(["gen", "--k", "6", "--n", "2", "--seed", "1", "--out", str(corpus)])
    out = tmp_path / "cmp.csv"
    assert main(["compare", "--rule-a", "nash", "--rule-b", "weak_pareto", str(corpus), "--out", str(out)]) == 0
    assert all(r["a_in_b"] == "1" for r in _rows(out))
    assert main(["compare", "--rule-a", "weighted:0.7,0.3", "--rule-b", "coarse:half_space:0.7,0.3",
                 str(corpus), "--out", str(out)]) == 0
    assert all(r["a_in_b"] == "1" and r["b_in_a"] == "1" for r in _rows(out))


def test_tolerance_range():
    with pytest.raises(SystemExit) as e:
        main(["solve", "--tol", "0.1", "--set", "orthant", "x.json"])
    assert e.value.code == 2
