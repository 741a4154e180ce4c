import json

import pytest

from bnselect.graphio import (
    ParseError,
    fixture_path,
    format_graph,
    from_json_dict,
    list_fixtures,
    load_cpts,
    load_fixture,
    parse_graph,
    to_dot,
    to_json_dict,
)
from bnselect.graphs import GraphError

SAMPLE = """\
# a toy description
node A states=2
node B states=3
node S states=2 role=selection value=1
A -> B
A -> S
"""


def test_parse_sample():
    pg = parse_graph(SAMPLE)
    assert pg.names == ("A", "B", "S")
    assert pg.decl("B").states == 3
    assert pg.selection_nodes == ("S",)
    assert pg.observed_nodes == ("A", "B")
    assert pg.selection_values() == {"S": 1}
    assert pg.directed == (("A", "B"), ("A", "S"))
    assert pg.undirected == ()


def test_parse_undirected_edge():
    pg = parse_graph("node A states=2\nnode B states=2\nA -- B\n")
    assert pg.undirected == (("A", "B"),)
    with pytest.raises(GraphError):
        pg.to_dag()
    assert pg.to_pdag().neighbors_of("A") == frozenset({"B"})


@pytest.mark.parametrize("text,fragment", [
    ("node A\n", "states"),
    ("node A states=1\n", "states"),
    ("node A states=2 role=chef\n", "role"),
    ("node A states=2 value=0\n", "value"),
    ("node A states=2 role=selection\n", "value"),
    ("node A states=2 role=selection value=5\n", "value"),
    ("node A states=2\nnode A states=2\n", "duplicate"),
    ("node A states=2\nA -> B\n", "B"),
    ("node A states=2\nnode B states=2\nA => B\n", "cannot parse"),
    ("nodule A states=2\n", "line"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as err:
        parse_graph(text)
    assert fragment in str(err.value)


def test_parse_error_carries_line_number():
    with pytest.raises(ParseError) as err:
        parse_graph("node A states=2\nnode A states=2\n")
    assert str(err.value).startswith("line 2:")


@pytest.mark.parametrize("name", ["fig1", "fig2", "fig3a", "fig4",
                                  "fig6a", "fig6b"])
def test_fixture_text_round_trip(name):
    pg = load_fixture(name)
    assert parse_graph(format_graph(pg)) == pg


@pytest.mark.parametrize("name", ["fig1", "fig6a"])
def test_fixture_json_round_trip(name):
    pg = load_fixture(name)
    data = json.loads(json.dumps(to_json_dict(pg)))
    assert from_json_dict(data) == pg


def test_list_fixtures():
    assert list_fixtures() == ["fig1", "fig2", "fig3a", "fig4",
                               "fig6a", "fig6b"]


def test_fixture_path_accepts_suffix():
    assert fixture_path("fig2") == fixture_path("fig2.graph")


def test_unknown_fixture_lists_bundled():
    with pytest.raises(FileNotFoundError) as err:
        fixture_path("fig9")
    assert "fig1" in str(err.value)


def test_fixture_contents_match_descriptions():
    fig2 = load_fixture("fig2")
    assert set(fig2.directed) == {("O1", "O2"), ("O1", "O3"),
                                  ("O2", "S"), ("O3", "S")}
    assert fig2.selection_values() == {"S": 0}
    fig6a = load_fixture("fig6a")
    assert set(fig6a.undirected) == {("O1", "O3"), ("O2", "O3"),
                                     ("O3", "O4")}


def test_to_dot_directed_and_undirected():
    pg = load_fixture("fig6a")
    dot = to_dot(pg.to_pdag(), highlight=["S"])
    assert "O4 -> O5;" in dot
    assert "O1 -> O3 [dir=none];" in dot
    assert "S [shape=box];" in dot


def test_load_cpts(tmp_path):
    path = tmp_path / "cpts.json"
    path.write_text(json.dumps({
        "A": {"given": [], "rows": [[0.4, 0.6]]},
        "B": {"given": ["A"], "rows": [[0.5, 0.5], [0.1, 0.9]]},
    }))
    cpts = load_cpts(path)
    assert set(cpts) == {"A", "B"}
    assert tuple(cpts["B"]["given"]) == ("A",)


def test_load_graph(tmp_path):
    path = tmp_path / "g.graph"
    path.write_text(SAMPLE)
    from bnselect.graphio import load_graph

    assert load_graph(path) == parse_graph(SAMPLE)
