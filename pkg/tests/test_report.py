import csv
import io
import json
from fractions import Fraction

import pytest

from seifert_floer.contact import classify
from seifert_floer.errors import ParseError
from seifert_floer.lattice import full_path, maslov
from seifert_floer.numtheory import best_upper_approx
from seifert_floer.plumbing import SeifertInvariants, brieskorn, parse_manifold, standard_graph, torus_model_graph
from seifert_floer.report import (
    CSV_HEADER,
    ReportDocument,
    SchemaVersionError,
    from_json,
    golden_fixtures,
    to_csv,
    to_json,
    to_table,
)

F = Fraction
FOUR_LEGS = SeifertInvariants(-2, (F(1, 2), F(1, 2), F(4, 7), F(6, 11)))


@pytest.fixture(scope="module")
def sigma347():
    return classify(brieskorn([3, 4, 47], True), descriptor="-Sigma(3,4,47)")


@pytest.fixture(scope="module")
def four_legs():
    return classify(FOUR_LEGS)


def test_json_round_trip(sigma347, four_legs):
    for r in (sigma347, four_legs):
        text = to_json(r)
        doc = from_json(text)
        assert doc == ReportDocument.from_report(r)
        assert to_json(doc) == text


def test_json_has_no_floats(four_legs):
    def walk(x):
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)
        else:
            assert not isinstance(x, float)

    data = json.loads(to_json(four_legs))
    walk(data)
    assert "5/36" in {s["d3"] for s in data["structures"]}


def test_schema_errors(sigma347):
    data = json.loads(to_json(sigma347))
    data["schema_version"] = "0"
    with pytest.raises(SchemaVersionError):
        from_json(json.dumps(data))
    with pytest.raises(ParseError):
        from_json("[1, 2]")
    with pytest.raises(ParseError):
        from_json("{not json")
    data["schema_version"] = "1"
    data["unexpected"] = 1
    with pytest.raises(ParseError):
        from_json(json.dumps(data))


def test_csv_rows(sigma347, four_legs):
    rows = list(csv.reader(io.StringIO(to_csv(sigma347))))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) - 1 == 16
    assert sum(1 for r in rows[1:] if r[3] == "-223") == 1
    rows2 = list(csv.reader(io.StringIO(to_csv(four_legs))))
    assert len(rows2) - 1 == 26


def test_table_layout(sigma347, four_legs):
    text = to_table(sigma347)
    assert text.count("Spin^c (") == 1
    assert "structures: 16 (tw -7: 15, tw -223: 1)" in text
    for h in (222, 198, 174, 126, 102, 78, 30):
        assert f"  {h}  " in text
    assert to_table(four_legs).count("Spin^c (") == 7
    lspace = to_table(classify(brieskorn([2, 3, 5], True)))
    assert "L-space: no negative-twisting contact structures" in lspace
    assert to_table(sigma347) == text


def test_fixture_sigma_3_4_47(sigma347):
    fx = golden_fixtures()["sigma_3_4_47"]
    assert sum(len(row["vectors"]) for row in fx["rows"]) == 15
    doc = ReportDocument.from_report(sigma347)
    got = [(F(g["d3"]), [tuple(doc.realised[k]["vector"]) for k in g["members"]], g["combined_height"]) for g in doc.groups]
    want = [(row["d3"], row["vectors"], row["height"]) for row in fx["rows"]]
    assert got == want
    assert parse_manifold(fx["also"])[0] == parse_manifold(fx["manifold"])[0]


def test_fixture_four_legs(four_legs):
    fx = golden_fixtures()["four_legs"]
    g = four_legs.graph
    free = [g.framings.index(m) for m in fx["free_framings"]]
    by_group = {}
    for gr in four_legs.groups:
        key = tuple(sorted(tuple(four_legs.realised[k].vector[i] for i in free) for k in gr.members))
        by_group[key] = gr
    for row in fx["rows"]:
        gr = by_group[tuple(sorted(row["free"]))]
        assert gr.d3 == row["d3"]
        tws = sorted({s.tw for s in four_legs.structures if set(s.cplus_coords) <= set(gr.members)}, reverse=True)
        assert tws == row["tw"]


def test_fixture_homology():
    fx = golden_fixtures()["homology"]
    assert len(fx) == 7
    assert fx["M(-1;1/2,1/3,1/6)"] == [((1, 0, -1, -4), F(-1, 2))]
    for name, rows in fx.items():
        g = torus_model_graph(name)
        for V, grade in rows:
            assert full_path(g, V, require_initial=False).ends_correctly
            assert maslov(g, V) == grade


def test_fixture_2323_and_approximations():
    fx = golden_fixtures()
    assert fx["2323"]["tw_multiset"] == {-5: 3, -11: 2, -17: 1}
    ap = fx["approximations"]
    for q, ps in ap["certificates"].items():
        assert tuple(best_upper_approx(r, q) for r in ap["r"]) == ps
    assert fx["counts"][("-Sigma(3,4,47)", 7)] == 15
