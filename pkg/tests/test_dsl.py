import pytest

from gen import random_model
from scjl2.dsl import DslError, LexError, ModelSource, ParseError, ResolveError, format, parse
from scjl2.dsl.topo import format_topology, parse_topology, topology_from_json, topology_to_json
from scjl2.scjmodel import BUILTINS, VARIANTS, build_model, builtin_topology


@pytest.mark.parametrize("seed", range(500))
def test_random_model_round_trip(seed):
    d = random_model(seed, nprocs=4, depth=5, rich=True)
    text = format(d)
    assert parse(text) == d
    assert format(parse(text)) == text


@pytest.mark.parametrize("name", BUILTINS)
def test_builtin_topology_round_trip(name):
    t = builtin_topology(name)
    text = format_topology(t)
    again = parse_topology(text)
    assert again.root == t.root
    assert format_topology(again) == text
    assert topology_from_json(topology_to_json(t)).root == t.root


@pytest.mark.parametrize("name", BUILTINS)
@pytest.mark.parametrize("variant", VARIANTS)
def test_generated_model_round_trip(name, variant):
    t = builtin_topology(name)
    if variant == "proposed":
        from scjl2.scjmodel import rewrite_for_proposed
        t = rewrite_for_proposed(t)
    d = build_model(t, variant).defs
    assert parse(format(d)) == d


def test_topology_json_input_is_accepted():
    import json
    t = builtin_topology("nested-pair")
    assert parse_topology(json.dumps(topology_to_json(t))).root == t.root


@pytest.mark.parametrize("text, cls, line, col", [
    ("cmodel 2\nmain Skip", ParseError, 1, 8),
    ("cmodel 1\nchannel a\nmain M = a -> $", LexError, 3, 15),
    ("cmodel 1\nchannel a\nmain M = b -> Skip", ResolveError, 3, 10),
    ("cmodel 1\nchannel a\nmain M = a -> (Skip", ParseError, 3, 20),
])
def test_diagnostics_carry_positions(text, cls, line, col):
    with pytest.raises(cls) as e:
        parse(ModelSource(text, "m.cmodel"))
    assert (e.value.line, e.value.col) == (line, col)
    assert str(e.value).startswith(f"m.cmodel:{line}:{col}:")


def test_topology_errors_name_the_file():
    with pytest.raises(DslError) as e:
        parse_topology(ModelSource("topo 1\nsequencer s {\n  mission m {\n  }\n", "bad.topo"))
    assert str(e.value).startswith("bad.topo:")


def test_format_parenthesises_by_precedence():
    d = parse("cmodel 1\nchannel a, b\nmain M = (a -> Skip [] b -> Skip) ; (Skip |~| Stop)")
    assert "(a -> Skip [] b -> Skip) ; (Skip |~| Stop)" in format(d)
