import random

import pytest

from generators import random_net, reachable_markings
from oracles import _effect as oracle_effect
from oracles import brute_bindings, brute_fire, power_set
from heraklit.net import (
    CONSUME, PRODUCE, READ, Arc, DependentOccurrences, EnumerationError, Marking,
    ModeOccurrence, Net, NotEnabled, Place, Transition, all_enabled,
    concurrent_step, enabled_bindings, fire, independent, is_enabled, net_problems,
)
from heraklit.signature import Signature, Structure
from heraklit.terms import App, Lit, Var
from heraklit.values import TRUE, Int, SetV, Sym, value

MENU = value({"rice", "meat", "fish"})


def occ(t, **binding):
    return ModeOccurrence(t, {k: value(v) for k, v in binding.items()})


def after_enter(net):
    return fire(net, net.initial_marking, occ("enter", xc="alice", xt=1))


def test_enter_bindings(restaurant):
    net = restaurant.net
    assert enabled_bindings(net, net.initial_marking, "enter") == [occ("enter", xc="alice", xt=1)]
    assert enabled_bindings(net, Marking(), "enter") == []


def test_select_has_seven_bindings(restaurant):
    net = restaurant.net
    m = after_enter(net)
    got = enabled_bindings(net, m, "select")
    assert len(got) == 7
    # power-set oracle: all 8 subsets of the menu, filtered by the guard
    expected = {occ("select", xc="alice", xt=1, m=MENU, d=d)
                for d in power_set(MENU.elems) if len(d) > 0}
    assert set(got) == expected
    assert set(got) == brute_bindings(net, m, net.transition("select"))
    assert got == sorted(got)


def test_fire_enter_then_select(restaurant):
    net = restaurant.net
    m1 = after_enter(net)
    assert dict(m1) == {"ready": value({("alice", 1)}).elems, "menu": {MENU}}
    assert m1["waiting"] == frozenset() and m1["free"] == frozenset()
    m2 = fire(net, m1, occ("select", xc="alice", xt=1, m=MENU, d={"rice", "meat"}))
    assert dict(m2) == {
        "menu": {MENU},
        "orders": {value((1, {"rice", "meat"}))},
        "pending": {value(("alice", 1))},
    }


def test_fire_not_enabled(restaurant):
    net = restaurant.net
    with pytest.raises(NotEnabled):
        fire(net, net.initial_marking, occ("enter", xc="bob", xt=1))
    with pytest.raises(NotEnabled):
        fire(net, after_enter(net), occ("select", xc="alice", xt=1, m=MENU, d=set()))
    assert not is_enabled(net, Marking(), occ("enter", xc="alice", xt=1))


def small_net(transitions, places=("p", "q"), marking=None, idempotent=False):
    sig = Signature(sorts={"S": None}, dynamic_predicates={p: "S" for p in places})
    st = Structure(carriers={"S": frozenset(value({"a", "b", "c"}).elems)})
    net = Net(sig, st, tuple(Place(p, "S") for p in places), tuple(transitions),
              Marking(marking or {}), idempotent)
    assert net_problems(net) == []
    return net


def test_transition_without_arcs():
    net = small_net([Transition("idle")], marking={"p": {Sym("a")}})
    o = ModeOccurrence("idle", {})
    assert all_enabled(net, net.initial_marking) == [o]
    assert fire(net, net.initial_marking, o) == net.initial_marking


def test_two_arcs_need_distinct_items():
    t = Transition("pair", (Arc("p", Var("x"), CONSUME), Arc("p", Var("y"), READ)))
    net = small_net([t], marking={"p": {Sym("a")}})
    assert all_enabled(net, net.initial_marking) == []
    m = Marking({"p": {Sym("a"), Sym("b")}})
    assert len(all_enabled(net, m)) == 2


def test_contact_freeness_and_idempotent_mode():
    t = Transition("put", (Arc("p", Var("x"), READ), Arc("q", Var("x"), PRODUCE)))
    marking = {"p": {Sym("a")}, "q": {Sym("a")}}
    strict = small_net([t], marking=marking)
    assert all_enabled(strict, strict.initial_marking) == []
    relaxed = small_net([t], marking=marking, idempotent=True)
    [o] = all_enabled(relaxed, relaxed.initial_marking)
    assert fire(relaxed, relaxed.initial_marking, o) == relaxed.initial_marking


def test_duplicate_produce_is_contact():
    t = Transition("twice", (Arc("q", Lit(Sym("a")), PRODUCE), Arc("q", Var("x"), PRODUCE)),
                   free_vars=(("x", "S"),))
    net = small_net([t])
    got = {o.env["x"] for o in all_enabled(net, Marking())}
    assert got == {Sym("b"), Sym("c")}


def test_integer_free_variable_cannot_be_enumerated():
    sig = Signature(dynamic_predicates={"n": "Int"})
    t = Transition("count", (Arc("n", Var("k"), PRODUCE),), free_vars=(("k", "Int"),))
    net = Net(sig, Structure(), (Place("n", "Int"),), (t,))
    with pytest.raises(EnumerationError):
        all_enabled(net, Marking())
    # bound by an in-arc instead, the same variable is fine
    t2 = Transition("inc", (Arc("n", Var("k"), CONSUME),
                            Arc("n", App("add", (Var("k"), Lit(Int(1)))), PRODUCE)))
    net2 = Net(sig, Structure(), (Place("n", "Int"),), (t2,), Marking({"n": {Int(4)}}))
    [o] = all_enabled(net2, net2.initial_marking)
    assert fire(net2, net2.initial_marking, o) == Marking({"n": {Int(5)}})


def test_independence_examples(restaurant2):
    net = restaurant2.net
    m = net.initial_marking
    a, b = occ("enter", xc="alice", xt=1), occ("enter", xc="bob", xt=2)
    assert independent(net, m, a, b)
    assert fire(net, fire(net, m, a), b) == fire(net, fire(net, m, b), a) \
        == concurrent_step(net, m, [a, b])
    c = occ("enter", xc="alice", xt=2)
    assert not independent(net, m, a, c)
    with pytest.raises(DependentOccurrences):
        concurrent_step(net, m, [a, c])
    assert concurrent_step(net, m, [a]) == fire(net, m, a)
    assert concurrent_step(net, m, []) == m


def test_shared_consumed_and_read_items(restaurant):
    net = restaurant.net
    m = after_enter(net)
    s1 = occ("select", xc="alice", xt=1, m=MENU, d={"rice"})
    s2 = occ("select", xc="alice", xt=1, m=MENU, d={"fish"})
    assert not independent(net, m, s1, s2)
    # a step consuming the menu item conflicts with the readers
    eat = Transition("eat_menu", (Arc("menu", Var("m"), CONSUME),))
    net2 = Net(net.signature, net.structure, net.places, net.transitions + (eat,),
               net.initial_marking)
    assert not independent(net2, m, s1, ModeOccurrence("eat_menu", {"m": MENU}))
    # two readers of the menu alone do not conflict
    look = Transition("look", (Arc("menu", Var("m"), READ),))
    net3 = Net(net.signature, net.structure, net.places, net.transitions + (look,),
               net.initial_marking)
    assert independent(net3, m, s1, ModeOccurrence("look", {"m": MENU}))


def test_consume_and_reproduce_is_dependent():
    # with idempotent produce, one step may add an item another one removes;
    # the two orders then end in different markings
    take = Transition("take", (Arc("p", Var("x"), CONSUME),))
    put = Transition("put", (Arc("q", Var("x"), READ), Arc("p", Var("x"), PRODUCE)))
    net = small_net([take, put], marking={"p": {Sym("a")}, "q": {Sym("a")}}, idempotent=True)
    m = net.initial_marking
    o1 = ModeOccurrence("take", {"x": Sym("a")})
    o2 = ModeOccurrence("put", {"x": Sym("a")})
    assert not independent(net, m, o1, o2)
    assert fire(net, fire(net, m, o1), o2) != fire(net, fire(net, m, o2), o1)
    o3 = ModeOccurrence("put", {"x": Sym("a")})
    net2 = small_net([take, put], marking={"p": {Sym("b")}, "q": {Sym("a")}}, idempotent=True)
    assert independent(net2, net2.initial_marking, ModeOccurrence("take", {"x": Sym("b")}), o3)


def corpus(n=60, markings=3, seed=0):
    rng = random.Random(seed)
    for _ in range(n):
        net = random_net(rng)
        yield net, reachable_markings(rng, net, markings)


def test_bindings_agree_with_oracle():
    for net, ms in corpus():
        for m in ms:
            for t in net.transitions:
                assert set(enabled_bindings(net, m, t)) == brute_bindings(net, m, t)


def test_fire_matches_oracle_and_is_local():
    for net, ms in corpus():
        for m in ms:
            for o in all_enabled(net, m):
                m2 = fire(net, m, o)
                assert m2 == brute_fire(net, m, o)
                adjacent = {a.place for a in net.transition(o.transition).arcs}
                for p in net.places:
                    if p.name not in adjacent:
                        assert m2[p.name] == m[p.name]


def test_diamond():
    for net, ms in corpus(seed=1):
        for m in ms:
            occs = all_enabled(net, m)
            for i, a in enumerate(occs):
                for b in occs[i + 1:]:
                    if independent(net, m, a, b):
                        assert is_enabled(net, fire(net, m, a), b)
                        assert is_enabled(net, fire(net, m, b), a)
                        assert fire(net, fire(net, m, a), b) == fire(net, fire(net, m, b), a)


def test_random_fixture_has_no_items_outside_sorts():
    for net, ms in corpus(10):
        for m in ms:
            for o in all_enabled(net, m):
                assert oracle_effect(net, m, net.transition(o.transition), o.env) is not None
    assert SetV() == SetV(()) and TRUE == value(True)
