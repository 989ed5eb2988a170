from dataclasses import replace

import pytest

from heraklit.signature import (
    ANY, BOOL, INT, SYMBOL, InfiniteCarrier, Powerset, Product, Signature,
    SortError, Structure, carrier, in_carrier, is_finite, resolve, unify, wf_check,
)
from heraklit.values import Int, SetV, Sym, Tup, value


def restaurant_world():
    sig = Signature(
        sorts={"Client": None, "Table": None, "Dish": None,
               "Dishes": Powerset("Dish"), "Seat": Product(("Client", "Table"))},
        constants={"menu_all": "Dishes"},
        functions={"home": (("Client",), "Table"), "both": (("Dishes", "Dishes"), "Dishes")},
        static_predicates={"vip": ("Client",), "same": ("Dish", "Dish")},
        dynamic_predicates={"waiting": "Client", "ready": "Seat", "menu": "Dishes"},
    )
    st = Structure(
        carriers={"Client": frozenset(value({"alice", "bob"}).elems),
                  "Table": frozenset({Int(1), Int(2)}),
                  "Dish": frozenset(value({"rice", "meat", "fish"}).elems)},
        constant_values={"menu_all": value({"rice", "meat", "fish"})},
        function_defs={"home": {Tup((Sym("alice"),)): Int(1), Tup((Sym("bob"),)): Int(2)},
                       "both": "union"},
        static_relations={"vip": frozenset({Tup((Sym("bob"),))}), "same": "eq"},
    )
    return sig, st


def test_restaurant_world_is_well_formed():
    assert wf_check(*restaurant_world()) == []


def _reasons(sig, st):
    return [p.reason for p in wf_check(sig, st)]


def test_missing_function_interpretation():
    sig, st = restaurant_world()
    defs = dict(st.function_defs)
    del defs["home"]
    probs = wf_check(sig, replace(st, function_defs=defs))
    assert len(probs) == 1
    assert probs[0].symbol == "home" and probs[0].reason == "uninterpreted symbol"


def test_constant_outside_carrier():
    sig, st = restaurant_world()
    st = replace(st, constant_values={"menu_all": value({"rice", "soup"})})
    reasons = _reasons(sig, st)
    assert len(reasons) == 1
    assert reasons[0].startswith("sort violation")


@pytest.mark.parametrize("mutate, fragment", [
    (lambda sig, st: (sig, replace(st, function_defs={**st.function_defs,
                                                      "home": {Tup((Sym("alice"),)): Int(1)}})),
     "not total"),
    (lambda sig, st: (sig, replace(st, function_defs={**st.function_defs,
                                                      "home": {Tup((Sym("alice"),)): Int(7),
                                                               Tup((Sym("bob"),)): Int(2)}})),
     "sort violation"),
    (lambda sig, st: (replace(sig, constants={**sig.constants, "waiting": "Client"}),
                      replace(st, constant_values={**st.constant_values,
                                                   "waiting": Sym("bob")})),
     "name clash"),
    (lambda sig, st: (sig, replace(st, carriers={**st.carriers, "Soup": frozenset()})),
     "undeclared symbol"),
    (lambda sig, st: (sig, replace(st, static_relations={**st.static_relations,
                                                         "vip": frozenset({Tup((Int(1),))})})),
     "sort violation"),
    (lambda sig, st: (sig, replace(st, static_relations={**st.static_relations, "same": "union"})),
     "not a relation"),
    (lambda sig, st: (sig, replace(st, static_relations={**st.static_relations, "same": "not"})),
     "takes"),
    (lambda sig, st: (replace(sig, sorts={**sig.sorts, "Loop": "Loop"}), st),
     "cyclic"),
])
def test_constructed_violations(mutate, fragment):
    reasons = _reasons(*mutate(*restaurant_world()))
    assert reasons and any(fragment in r for r in reasons), reasons


def test_resolve_and_carriers():
    sig, st = restaurant_world()
    sig = replace(sig, sorts={**sig.sorts, "Chair": "Seat"})
    assert resolve(sig, "Chair") == Product(("Client", "Table"))
    assert len(carrier(sig, st, "Seat")) == 4
    assert len(carrier(sig, st, "Dishes")) == 8
    assert carrier(sig, st, BOOL) == frozenset(value({True, False}).elems)
    assert in_carrier(sig, st, "Seat", value(("alice", 2)))
    assert not in_carrier(sig, st, "Seat", value((2, "alice")))
    assert in_carrier(sig, st, INT, Int(10 ** 9))
    assert not is_finite(sig, Powerset(INT))
    with pytest.raises(InfiniteCarrier):
        carrier(sig, st, Product(("Client", INT)))
    with pytest.raises(SortError):
        resolve(sig, "Nope")


@pytest.mark.parametrize("a, b, expected", [
    ("Dish", SYMBOL, "Dish"),
    (SYMBOL, SYMBOL, SYMBOL),
    (INT, SYMBOL, None),
    (Powerset(ANY), Powerset("Dish"), Powerset("Dish")),
    (Product(("Client", SYMBOL)), Product((SYMBOL, "Table")), Product(("Client", "Table"))),
    ("Client", "Table", None),
])
def test_unify(a, b, expected):
    assert unify(a, b) == expected
    assert unify(b, a) == expected


def test_empty_set_constant_is_fine():
    sig, st = restaurant_world()
    st = replace(st, constant_values={"menu_all": SetV()})
    assert wf_check(sig, st) == []
