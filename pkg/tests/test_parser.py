from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncdc3d.fixtures import FIXTURES, fixture, fixture_text
from ncdc3d.model import (
    Basic,
    BasicRelation,
    Constraint,
    Default,
    Disjunctive,
    GridSpec,
    Network,
    Tile,
)
from ncdc3d.parser import ParseError, parse_network, serialize_network

from conftest import random_network


def test_basic_line():
    net = parse_network("rel Marsh SedRock SWB:SEB\n")
    assert net.constraints == (Constraint("Marsh", "SedRock", Basic(BasicRelation.of(Tile.SWB, Tile.SEB))),)
    assert net.objects == ("Marsh", "SedRock")


def test_disjunctive_line():
    net = parse_network("disj Panel Entrance NM | NB")
    (c,) = net.constraints
    assert c.relation == Disjunctive((BasicRelation.of("NM"), BasicRelation.of("NB")))


def test_unknown_tile_span():
    with pytest.raises(ParseError) as err:
        parse_network("objects A B\nrel A B XYZ\n")
    assert (err.value.span.line, err.value.span.column) == (2, 9)
    assert "XYZ" in str(err.value)


def test_unknown_tile_inside_multi_tile_relation():
    with pytest.raises(ParseError) as err:
        parse_network("rel A B NM:QQ")
    assert err.value.span.column == 12


@pytest.mark.parametrize("text,line,col", [
    ("grid 0 3 3", 1, 6),
    ("grid 3 -1 3", 1, 8),
    ("objects a b\nfoo a b", 2, 1),
    ("rel a b", 1, 8),
    ("rel a b NM extra", 1, 12),
    ("disj a b NM |", 1, 13),
    ("disj a b NM", 1, 12),
    ("objects 1a", 1, 9),
    ("objects a a", 1, 11),
    ("rel a b NM\nmandatory b a", 2, 1),
    ("rel a b NM\nrel a b SM", 2, 1),
])
def test_errors_carry_span_inside_input(text, line, col):
    with pytest.raises(ParseError) as err:
        parse_network(text)
    span = err.value.span
    assert (span.line, span.column) == (line, col)
    lines = text.splitlines()
    assert 1 <= span.line <= len(lines)
    assert 1 <= span.column <= len(lines[span.line - 1]) + 1


def test_declaration_order_then_first_appearance():
    net = parse_network("objects b\nrel c a NM\nrel a b SM\n")
    assert net.objects == ("b", "c", "a")


def test_comments_case_and_crlf():
    text = "# header\r\nobjects a b\r\nrel a b swb:Seb # trailing\r\nconnected\r\ngrid 3 4 5\r\n"
    net = parse_network(text)
    assert net.constraints[0].relation == Basic(BasicRelation.of("SWB", "SEB"))
    assert net.connected
    assert net.grid == GridSpec(3, 4, 5)


def test_all_statements():
    net = parse_network(
        "objects a b c\n"
        "disj a b NM | NB\n"
        "default c b SWB\n"
        "mandatory a b\n"
        "ab c\n"
        "infer c a\n"
    )
    assert net.constraints[0].mandatory
    assert net.constraints[1].relation == Default(BasicRelation.of("SWB"))
    assert net.ab_marks == {"c"}
    assert net.infer_requests == (("c", "a"),)


def test_serialize_empty_network():
    assert serialize_network(Network(("a", "b"))) == "objects a b\n"


def test_serialize_marine():
    text = serialize_network(fixture("marine"))
    lines = text.splitlines()
    assert lines[0] == "objects SedRock Marsh Volcano Kelp Fungi"
    assert lines[1:] == [
        "rel Marsh SedRock SWB:SEB",
        "rel Volcano SedRock SEA:EA",
        "rel Volcano Marsh NEA",
        "rel Kelp Volcano SEB:NB",
        "rel Fungi Kelp SM",
        "rel Fungi Marsh EB",
        "infer Fungi SedRock",
    ]


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_round_trip(name):
    net = fixture(name)
    assert parse_network(serialize_network(net)) == net
    assert parse_network(fixture_text(name)) == net


def test_hundred_random_networks_round_trip():
    rng = random.Random(7)
    for _ in range(100):
        net = random_network(rng, rng.randint(2, 6), rng.randint(0, 8), defaults=rng.randint(0, 3),
                             disjunctions=True, max_tiles=5)
        text = serialize_network(net)
        again = parse_network(text)
        assert again == net
        assert serialize_network(again) == text


names = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,6}", fullmatch=True)
tiles = st.sets(st.sampled_from(list(Tile)), min_size=1, max_size=6).map(lambda s: BasicRelation(frozenset(s)))


@st.composite
def networks(draw):
    objects = draw(st.lists(names, min_size=2, max_size=5, unique=True))
    pairs = [(a, b) for a in objects for b in objects if a != b]
    hard = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    soft = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=3))
    constraints = []
    for pair in hard:
        if draw(st.booleans()):
            constraints.append(Constraint(*pair, Basic(draw(tiles)), draw(st.booleans())))
        else:
            alts = tuple(draw(st.lists(tiles, min_size=2, max_size=3, unique=True)))
            constraints.append(Constraint(*pair, Disjunctive(alts), draw(st.booleans())))
    constraints += [Constraint(*pair, Default(draw(tiles))) for pair in soft]
    ab = draw(st.sets(st.sampled_from(objects), max_size=2))
    infer = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=2))
    grid = draw(st.none() | st.builds(GridSpec, st.integers(1, 9), st.integers(1, 9), st.integers(1, 9)))
    # the writer lists mandatory lines after every constraint, so order hard constraints first
    ordered = [c for c in constraints if not c.is_default] + [c for c in constraints if c.is_default]
    return Network(tuple(objects), tuple(ordered), frozenset(ab), tuple(infer), draw(st.booleans()), grid)


@given(networks())
def test_round_trip_property(net):
    text = serialize_network(net)
    assert parse_network(text) == net
    assert serialize_network(parse_network(text)) == text
