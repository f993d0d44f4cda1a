import json

import pytest

from acceptance import RowResult, parse_rows
from circle_quantum import relation_instances
from coefficients import Scalar
from errors import ParseError, PreconditionError
from intervals_ktheory import Arc
from quiver_hall import HallElement, TorsionObject
from workbench import build_parser, parse_element, run, sample_instances


def run_json(capsys, *argv):
    code = run(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_invariants(capsys):
    code, out = run_json(capsys, "invariants", "--class", "rank=1,dim=0:0", "--n", "2")
    assert code == 0
    assert out["deg_n"] == "0"
    assert out["slope"] == "0"


def test_hall_product_matches_the_library(capsys, hall2):
    code, out = run_json(capsys, "hall-product", "--left", "0,1/2", "--right", "1/2,1", "--q", "2")
    assert code == 0
    left = HallElement.basis(2, TorsionObject.simple(2, 1))
    right = HallElement.basis(2, TorsionObject.simple(2, 2))
    assert HallElement.from_json(out["product"]) == hall2.product(left, right)


def test_verify_join(capsys):
    code, out = run_json(capsys, "verify", "--family", "join", "--j1", "0,1/3", "--j2", "1/3,2/3", "--n", "3")
    assert code == 0
    assert out["holds"]


def test_zeta_coefficients(capsys):
    code, out = run_json(capsys, "zeta", "--g", "0", "--q", "2", "--order", "3")
    assert code == 0
    assert out["coefficients"] == [Scalar.rational(2, c).to_json() for c in (1, 3, 7, 15)]
    assert out["functional_equation"]


def test_mirror_homext(capsys):
    code, out = run_json(capsys, "mirror-homext", "--a", "(0,1/2]", "--b", "(1/2,1]")
    assert code == 0
    assert (out["hom"], out["ext1"]) == (0, 1)
    code, out = run_json(capsys, "mirror-homext", "--dtype", "Y", "--a", "1/2", "--b", "1/3")
    assert out["records"][0]["hom"] == 1


def test_output_file(capsys, tmp_path):
    target = tmp_path / "result.json"
    code, out = run_json(capsys, "embed", "--n", "3", "--output", str(target))
    assert code == 0
    assert json.loads(target.read_text(encoding="utf-8")) == out


@pytest.mark.parametrize("argv", [
    [],
    ["verify", "--family", "bogus"],
    ["invariants", "--class", "garbage"],
    ["hall-product", "--left", "0,1/2"],
    ["suite", "--rows", "one"],
])
def test_parse_errors_exit_with_1(capsys, argv):
    assert run(argv) == 1


@pytest.mark.parametrize("argv", [
    ["hall-product", "--left", "0,1/2", "--right", "1/2,1", "--q", "6"],
    ["hall-product", "--left", "0,1/2", "--right", "1/2,1", "--profile", "nonexistent"],
    ["suite", "--rows", "99"],
    ["mirror-homext", "--a", "(0,1/2]"],
])
def test_precondition_errors_exit_with_2(capsys, argv):
    assert run(argv) == 2
    assert json.loads(capsys.readouterr().out)["code"] == 2


def test_bound_exceeded_exits_with_3(capsys):
    code, out = run_json(capsys, "hall-product", "--left", "0,1/2", "--right", "1/2,1", "--dim-bound", "1")
    assert code == 3
    assert out["code"] == 3
    assert "exceeds bound 1" in out["error"]


def test_suite_determinism_row(capsys):
    code, out = run_json(capsys, "suite", "--rows", "10")
    assert code == 0
    assert out["passed"]
    assert [r["status"] for r in out["rows"]] == ["pass"]


def test_parse_element_accepts_json_and_arcs(hall2):
    element = parse_element("0,1/2 + 1/2,1", 2, 2)
    assert element.support() == [TorsionObject(2, (Arc.cell(2, 1), Arc.cell(2, 2)))]
    assert parse_element(json.dumps(element.to_json()), 2, 2) == element
    with pytest.raises(ParseError):
        parse_element("{oops", 2, 2)


def test_row_helpers():
    assert parse_rows(None) is None
    assert parse_rows("1, 3") == [1, 3]
    result = RowResult(4)
    assert result.status == "skipped"
    result.expect(True, "ok")
    assert result.status == "pass"
    result.skipped += 1
    assert result.status == "partial"
    result.expect(False, "broken")
    assert result.to_json()["status"] == "fail"
    assert result.to_json()["failures"] == ["broken"]


def test_every_subcommand_is_registered():
    parser = build_parser()
    subcommands = parser._subparsers._group_actions[0].choices
    assert set(subcommands) == {
        "hall-product", "coproduct", "pairing", "verify", "straighten", "hubery", "central", "shuffle", "zeta",
        "mirror-compare", "mirror-homext", "fundrep", "embed", "invariants", "suite",
    }


def test_sample_instances_is_seeded_and_ordered():
    instances = list(range(20))
    first = sample_instances(instances, 5, seed=7)
    assert first == sample_instances(instances, 5, seed=7)
    assert first == sorted(first)
    assert len(set(first)) == 5
    assert sample_instances(instances, 50, seed=7) == instances
    with pytest.raises(PreconditionError):
        sample_instances(instances, 0, seed=7)


def test_verify_sample_uses_the_seed(capsys):
    total = len(relation_instances("dj", 2, 2))
    argv = ("verify", "--family", "dj", "--n", "2", "--q", "2", "--sample", "2", "--seed", "11")
    code, first = run_json(capsys, *argv)
    assert code == 0
    assert first["holds"]
    assert first["seed"] == 11
    assert len(first["certificates"]) == min(2, total)
    _, second = run_json(capsys, *argv)
    assert second["certificates"] == first["certificates"]
