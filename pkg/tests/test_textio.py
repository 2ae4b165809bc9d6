from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from metcat import oracles as O
from metcat.ban.spaces import LinMap, l1_space, linf_space, zero_space
from metcat.extdist import INF
from metcat.met.approx import eps_pushout
from metcat.met.core import NonexpMap, homset, identity, one_point
from metcat.textio import (
    ParseError, format_banmap, format_banspace, format_map, format_space, parse_text,
    render_label, stringify_space,
)

SAMPLE = """\
space X          # a path
points a b c
dist a b 1/2
dist b c 1/2
dist a c 1
space Y
points p q
dist p q 1/2
map f X -> Y
a -> p
b -> p
c -> q
chain C
stage Y
link g
"""


def test_parse_sample():
    doc = parse_text(SAMPLE.replace("chain C\nstage Y\nlink g\n", ""))
    X = doc.spaces["X"]
    assert X.dist("a", "c") == 1
    assert doc.maps["f"].images == ("p", "p", "q")


def test_unlisted_pairs_are_inf():
    doc = parse_text("space Z\npoints u v\n")
    assert doc.spaces["Z"].dist("u", "v") is INF


@pytest.mark.parametrize("text, line, col", [
    ("space X\npoints a b\ndist a b 1/0\n", 3, 10),
    ("space X\npoints a b\ndist a b 1\ndist b a 2\n", 4, 10),
    ("space X\npoints a b\ndist a z 1\n", 3, 8),
    ("space X\npoints a\nmap f X -> Q\n", 3, 12),
    ("spaces X\n", 1, 1),
    ("space X\npoints a b\ndist a b 0.5\n", 3, 10),
    ("space X\npoints a b\nmap f X X\n", 3, 9),
])
def test_parse_errors_carry_positions(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_text(text)
    assert (info.value.line, info.value.col) == (line, col)


def test_expanding_map_is_a_parse_error():
    text = "space X\npoints a b\ndist a b 1\nspace Y\npoints p q\ndist p q 2\n" \
           "map f X -> Y\na -> p\nb -> q\n"
    with pytest.raises(ParseError, match="expands"):
        parse_text(text)


def test_chain_block():
    text = SAMPLE.replace("link g", "link f").replace("stage Y", "stage X\nstage Y")
    ch = parse_text(text).chains["C"]
    assert len(ch) == 2 and ch.links[0].images == ("p", "p", "q")


def test_render_label_nests():
    assert render_label((1, ("a", 2))) == "(1,(a,2))"


def test_stringify_rejects_spaces_in_labels():
    from metcat.met.core import MetSpace
    with pytest.raises(ValueError):
        stringify_space(MetSpace(["a b"], [[0]]))


@given(st.sampled_from([X for n in (1, 2, 3) for X in O.metric_spaces(n)]))
def test_space_round_trip(X):
    doc = parse_text(format_space(X, "X"))
    assert doc.spaces["X"] == X


def test_map_round_trip_with_tuple_labels():
    sq = eps_pushout(identity(one_point()), identity(one_point()), F(1, 4))
    text = "\n\n".join([format_space(one_point(), "One"), format_space(sq.apex, "P"),
                        format_map(sq.g1, "g1", "One", "P")])
    doc = parse_text(text)
    assert doc.spaces["P"] == stringify_space(sq.apex)
    assert doc.maps["g1"].images == ("(1,*)",)


def test_banspace_round_trip():
    X = linf_space(2)
    text = format_banspace(X, "V", facets=True)
    assert "facet" not in text  # facets not computed yet
    X.ensure_facets()
    doc = parse_text(format_banspace(X, "V", facets=True))
    assert doc.banspaces["V"] == X and doc.banspaces["V"].facets == X.facets


def test_banmap_round_trip_and_zero_domain():
    f = LinMap(l1_space(1), linf_space(2), [[1], [F(-1, 2)]])
    text = "\n".join([format_banspace(f.dom, "R"), format_banspace(f.cod, "V"),
                      format_banmap(f, "f", "R", "V")])
    assert parse_text(text).banmaps["f"] == f
    z = LinMap(zero_space(), l1_space(1), [[]])
    text = "\n".join([format_banspace(z.dom, "Z"), format_banspace(z.cod, "R"),
                      format_banmap(z, "z", "Z", "R")])
    assert parse_text(text).banmaps["z"] == z


def test_banspace_errors():
    with pytest.raises(ParseError) as info:
        parse_text("banspace V dim 2\ngen 1 0\n")
    assert info.value.line == 1  # does not span
    with pytest.raises(ParseError) as info:
        parse_text("banspace V dim 2\ngen 1 0 0\n")
    assert (info.value.line, info.value.col) == (2, 1)


def test_maps_from_every_hom_round_trip():
    X, Y = O.metric_spaces(2)[1], O.metric_spaces(3)[4]
    for f in homset(X, Y):
        text = "\n".join([format_space(X, "X"), format_space(Y, "Y"), format_map(f, "f", "X", "Y")])
        g = parse_text(text).maps["f"]
        assert g.images == f.images and isinstance(g, NonexpMap)
