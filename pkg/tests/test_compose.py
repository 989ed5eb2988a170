import random
from dataclasses import replace

import pytest

from conftest import model_path
from generators import compatible_triple, random_module
from heraklit.compose import (
    CompositionError, ModuleNet, compose, empty_module, isomorphic, module_problems, qualify,
)
from heraklit.dsl import parse, parse_file
from heraklit.net import Place
from heraklit.statespace import build_reachability, canonical_form


def unqualified(occ):
    return f"{occ.transition.rsplit('.', 1)[-1]}[{occ.binding_text()}]"


def test_front_of_house_with_kitchen_matches_monolith(restaurant):
    kitchen = parse_file(model_path("kitchen.hkt"))
    full = parse_file(model_path("restaurant_full.hkt"))
    c = compose(restaurant, kitchen)
    assert module_problems(c) == []
    assert c.name == "restaurant_kitchen"
    assert {p.name for p in c.net.places} == {
        "orders", "restaurant.waiting", "restaurant.free", "restaurant.ready",
        "restaurant.menu", "restaurant.pending", "kitchen.meals"}
    assert (c.left, c.right) == ((), ())
    g1 = build_reachability(c.net)
    g2 = build_reachability(full.net)
    assert len(g1.nodes) <= 50
    assert canonical_form(g1, unqualified) == canonical_form(g2, unqualified)
    assert (len(g1.nodes), len(g1.edges)) == (16, 15)


def test_empty_module_is_identity(restaurant):
    for c in (compose(restaurant, empty_module()), compose(empty_module(), restaurant)):
        assert isomorphic(c, restaurant)
        assert canonical_form(build_reachability(c.net), unqualified) == \
            canonical_form(build_reachability(restaurant.net), unqualified)


def test_sort_mismatch(restaurant):
    kitchen = parse_file(model_path("kitchen.hkt"))
    bad = replace(kitchen.net, places=(Place("orders", "Table"), Place("meals", "Order")))
    bad = replace(bad, signature=replace(bad.signature, dynamic_predicates={
        "orders": "Table", "meals": "Order"}))
    with pytest.raises(CompositionError, match="sort mismatch"):
        compose(restaurant, ModuleNet(bad, ("orders",), (), "kitchen"))


def test_conflicting_interpretation(restaurant):
    src = """module other;
sort Table = {1, 2, 3};
sort Dish = {rice, meat, fish};
powerset sort Dishes = Dish;
sort Order = (Table, Dishes);
place orders : Order;
interface left (orders);
"""
    with pytest.raises(CompositionError, match="conflicting"):
        compose(restaurant, parse(src))


def test_duplicate_transition_after_qualification(restaurant):
    with pytest.raises(CompositionError, match="duplicate"):
        compose(restaurant, restaurant)


def test_qualify():
    assert qualify("m", "p") == "m.p"
    assert qualify("m", "k.p") == "k.p"


def test_interfaces_conserved():
    rng = random.Random(11)
    for _ in range(30):
        a, b, c = compatible_triple(rng)
        ab = compose(a, b)
        assert module_problems(ab) == []
        fused = set(a.right) & set(b.left)
        labels = list(ab.left) + list(ab.right)
        # each input label is either fused or propagated, exactly once
        assert len(labels) == len(set(labels)) and not fused & set(labels)
        assert set(labels) | fused == set(a.left + a.right + b.left + b.right)
        for lab in fused:
            assert ab.net.has_place(lab)


def test_associativity():
    rng = random.Random(12)
    for _ in range(20):
        a, b, c = compatible_triple(rng)
        assert isomorphic(compose(compose(a, b), c), compose(a, compose(b, c)))


def test_isomorphism_notices_differences():
    rng = random.Random(4)
    m = random_module(rng)
    assert isomorphic(m, m)
    other = replace(m, left=(), right=())
    if m.left or m.right:
        assert not isomorphic(m, other)
