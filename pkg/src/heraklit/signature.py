"""Many-sorted signatures and the heterogeneous structures that
interpret them.

Sorts are either basic (named, interpreted by a carrier set), the builtin
``Int`` and ``Bool``, or built from other sorts: products ``(A, B)`` and
powersets ``powerset A``.  A signature may also name such composite sorts
(``sort Seat = (Client, Table)``); names are aliases and compare
structurally after resolution.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Union

from .values import (
    Bool, Int, SetV, Sym, Tup, Value, BOOL_CARRIER, is_builtin, builtin_arity,
    canonical_text,
)

__all__ = [
    "INT", "BOOL", "Product", "Powerset", "Sort", "Signature", "Structure",
    "Problem", "SortError", "InfiniteCarrier", "resolve", "sort_text",
    "carrier", "in_carrier", "wf_check",
]

INT = "Int"
BOOL = "Bool"
BUILTIN_SORTS = (INT, BOOL)

# wildcards used while sort checking literals and empty set terms
SYMBOL = "?symbol"
ANY = "?any"


@dataclass(frozen=True)
class Product:
    parts: tuple


@dataclass(frozen=True)
class Powerset:
    elem: "Sort"


Sort = Union[str, Product, Powerset]


def sort_text(s: Sort) -> str:
    if isinstance(s, Product):
        return "(" + ", ".join(sort_text(p) for p in s.parts) + ")"
    if isinstance(s, Powerset):
        return "powerset " + sort_text(s.elem)
    if s == SYMBOL:
        return "<symbol>"
    if s == ANY:
        return "<any>"
    return s


class SortError(Exception):
    pass


class InfiniteCarrier(Exception):
    """Raised when enumerating a carrier that is not finite."""


@dataclass(frozen=True)
class Problem:
    symbol: str
    reason: str

    def __str__(self):
        return f"{self.symbol}: {self.reason}"


@dataclass(frozen=True)
class Signature:
    """Symbol vocabulary.

    ``sorts`` maps each declared sort name to ``None`` (basic sort) or to
    the sort expression it abbreviates.  ``Int`` and ``Bool`` are always
    available and never listed.
    """
    sorts: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)          # name -> sort
    functions: dict = field(default_factory=dict)          # name -> (arg sorts, result sort)
    static_predicates: dict = field(default_factory=dict)  # name -> arg sorts
    dynamic_predicates: dict = field(default_factory=dict)  # name -> item sort

    def kind_of(self, name: str) -> str | None:
        for kind in ("sorts", "constants", "functions", "static_predicates",
                     "dynamic_predicates"):
            if name in getattr(self, kind):
                return kind
        return None


@dataclass(frozen=True)
class Structure:
    """Interpretation of a signature.

    carriers: basic sort name -> frozenset of Values
    constant_values: constant name -> Value
    function_defs: function name -> builtin name (str) or dict mapping
        argument Tup -> result Value
    static_relations: predicate name -> builtin name or frozenset of Tup
    """
    carriers: dict = field(default_factory=dict)
    constant_values: dict = field(default_factory=dict)
    function_defs: dict = field(default_factory=dict)
    static_relations: dict = field(default_factory=dict)


def resolve(sig: Signature, s: Sort, _seen=()) -> Sort:
    """Expand aliases so that only basic names remain at the leaves."""
    if isinstance(s, Product):
        return Product(tuple(resolve(sig, p, _seen) for p in s.parts))
    if isinstance(s, Powerset):
        return Powerset(resolve(sig, s.elem, _seen))
    if s in BUILTIN_SORTS or s in (SYMBOL, ANY):
        return s
    if s not in sig.sorts:
        raise SortError(f"undeclared sort {s}")
    d = sig.sorts[s]
    if d is None:
        return s
    if s in _seen:
        raise SortError(f"cyclic sort alias {s}")
    return resolve(sig, d, _seen + (s,))


def unify(a: Sort, b: Sort) -> Sort | None:
    """Most specific common sort of two resolved sorts, or None."""
    if a == b:
        return a
    if a == ANY:
        return b
    if b == ANY:
        return a
    if isinstance(a, Product) and isinstance(b, Product):
        if len(a.parts) != len(b.parts):
            return None
        parts = [unify(x, y) for x, y in zip(a.parts, b.parts)]
        return None if None in parts else Product(tuple(parts))
    if isinstance(a, Powerset) and isinstance(b, Powerset):
        e = unify(a.elem, b.elem)
        return None if e is None else Powerset(e)
    if a == SYMBOL and isinstance(b, str) and b not in BUILTIN_SORTS:
        return b
    if b == SYMBOL and isinstance(a, str) and a not in BUILTIN_SORTS:
        return a
    return None


def sort_of_value(v: Value) -> Sort:
    if isinstance(v, Int):
        return INT
    if isinstance(v, Bool):
        return BOOL
    if isinstance(v, Sym):
        return SYMBOL
    if isinstance(v, Tup):
        return Product(tuple(sort_of_value(x) for x in v.items))
    s = ANY
    for x in v.elems:
        s = unify(s, sort_of_value(x))
        if s is None:
            raise SortError(f"heterogeneous set {canonical_text(v)}")
    return Powerset(s)


def carrier(sig: Signature, st: Structure, s: Sort) -> frozenset:
    """Enumerate the carrier of a sort; raises InfiniteCarrier for Int."""
    s = resolve(sig, s)
    return frozenset(_enumerate(st, s))


def _enumerate(st: Structure, s: Sort) -> Iterator[Value]:
    if isinstance(s, Product):
        pools = [sorted(_enumerate(st, p)) for p in s.parts]
        for combo in itertools.product(*pools):
            yield Tup(combo)
    elif isinstance(s, Powerset):
        base = sorted(_enumerate(st, s.elem))
        for r in range(len(base) + 1):
            for sub in itertools.combinations(base, r):
                yield SetV(sub)
    elif s in (INT, SYMBOL):
        raise InfiniteCarrier(f"the {sort_text(s)} carrier cannot be enumerated")
    elif s == BOOL:
        yield from BOOL_CARRIER
    else:
        yield from st.carriers.get(s, ())


def is_finite(sig: Signature, s: Sort) -> bool:
    s = resolve(sig, s)
    if isinstance(s, Product):
        return all(is_finite(sig, p) for p in s.parts)
    if isinstance(s, Powerset):
        return is_finite(sig, s.elem)
    return s not in (INT, SYMBOL)


def in_carrier(sig: Signature, st: Structure, s: Sort, v: Value) -> bool:
    return _member(st, resolve(sig, s), v)


def _member(st: Structure, s: Sort, v: Value) -> bool:
    if isinstance(s, Product):
        return (isinstance(v, Tup) and len(v.items) == len(s.parts)
                and all(_member(st, p, x) for p, x in zip(s.parts, v.items)))
    if isinstance(s, Powerset):
        return isinstance(v, SetV) and all(_member(st, s.elem, x) for x in v.elems)
    if s == INT:
        return isinstance(v, Int)
    if s == BOOL:
        return isinstance(v, Bool)
    if s == SYMBOL:
        return isinstance(v, Sym)
    return v in st.carriers.get(s, ())


def _sort_problems(sig: Signature, owner: str, s: Sort) -> list:
    try:
        resolve(sig, s)
    except SortError as e:
        return [Problem(owner, str(e))]
    return []


def wf_check(sig: Signature, st: Structure) -> list:
    """List every way the structure fails to interpret the signature.

    An empty list means the pair is well-formed.
    """
    out = []
    cats = ("sorts", "constants", "functions", "static_predicates",
            "dynamic_predicates")
    seen = {}
    for cat in cats:
        for name in getattr(sig, cat):
            if name in seen:
                out.append(Problem(name, f"name clash between {seen[name]} and {cat}"))
            seen[name] = cat
            if name in BUILTIN_SORTS or is_builtin(name):
                out.append(Problem(name, "name clash with builtin"))

    for name, d in sig.sorts.items():
        if d is None:
            if name not in st.carriers:
                out.append(Problem(name, "uninterpreted symbol"))
            else:
                for v in st.carriers[name]:
                    if isinstance(v, (Tup, SetV)):
                        out.append(Problem(name, f"sort violation: carrier element "
                                                 f"{canonical_text(v)} is not atomic"))
        else:
            out += _sort_problems(sig, name, d)
            if name in st.carriers:
                out.append(Problem(name, "alias sort must not have a carrier"))
    for name in st.carriers:
        if name not in sig.sorts:
            out.append(Problem(name, "interpretation of undeclared symbol"))

    for name, s in sig.constants.items():
        probs = _sort_problems(sig, name, s)
        out += probs
        if name not in st.constant_values:
            out.append(Problem(name, "uninterpreted symbol"))
        elif not probs and not in_carrier(sig, st, s, st.constant_values[name]):
            out.append(Problem(name, "sort violation: value "
                               f"{canonical_text(st.constant_values[name])} "
                               f"outside carrier of {sort_text(s)}"))
    for name in st.constant_values:
        if name not in sig.constants:
            out.append(Problem(name, "interpretation of undeclared symbol"))

    for name, (args, res) in sig.functions.items():
        probs = []
        for s in (*args, res):
            probs += _sort_problems(sig, name, s)
        out += probs
        if name not in st.function_defs:
            out.append(Problem(name, "uninterpreted symbol"))
            continue
        if probs:
            continue
        out += _check_table(sig, st, name, args, res, st.function_defs[name])
    for name in st.function_defs:
        if name not in sig.functions:
            out.append(Problem(name, "interpretation of undeclared symbol"))

    for name, args in sig.static_predicates.items():
        probs = []
        for s in args:
            probs += _sort_problems(sig, name, s)
        out += probs
        if name not in st.static_relations:
            out.append(Problem(name, "uninterpreted symbol"))
            continue
        rel = st.static_relations[name]
        if isinstance(rel, str):
            out += _check_builtin(name, rel, len(args), relation=True)
        elif not probs:
            for row in sorted(rel):
                if not (isinstance(row, Tup) and len(row) == len(args)
                        and all(in_carrier(sig, st, s, x) for s, x in zip(args, row))):
                    out.append(Problem(name, f"sort violation: row {canonical_text(row)}"))
    for name in st.static_relations:
        if name not in sig.static_predicates:
            out.append(Problem(name, "interpretation of undeclared symbol"))

    for name, s in sig.dynamic_predicates.items():
        out += _sort_problems(sig, name, s)
    return out


_BOOL_BUILTINS = frozenset({"elem", "subset", "not_empty", "eq", "neq", "lt", "leq",
                            "and", "or", "not"})


def _check_builtin(name, op, nargs, relation=False):
    if not is_builtin(op):
        return [Problem(name, f"unknown builtin {op}")]
    if relation and op not in _BOOL_BUILTINS:
        return [Problem(name, f"builtin {op} is not a relation")]
    arity = builtin_arity(op)
    if arity is not None and arity != nargs:
        return [Problem(name, f"builtin {op} takes {arity} arguments, declared {nargs}")]
    return []


def _check_table(sig, st, name, args, res, interp):
    if isinstance(interp, str):
        return _check_builtin(name, interp, len(args))
    out = []
    for k, v in sorted(interp.items()):
        if not (isinstance(k, Tup) and len(k) == len(args)
                and all(in_carrier(sig, st, s, x) for s, x in zip(args, k))):
            out.append(Problem(name, f"sort violation: table argument {canonical_text(k)}"))
        if not in_carrier(sig, st, res, v):
            out.append(Problem(name, f"sort violation: table result {canonical_text(v)}"))
    if all(is_finite(sig, s) for s in args):
        domain = itertools.product(*[sorted(carrier(sig, st, s)) for s in args])
        missing = [Tup(d) for d in domain if Tup(d) not in interp]
        if missing:
            out.append(Problem(name, f"table not total: missing {canonical_text(missing[0])}"
                               + (f" and {len(missing) - 1} more" if len(missing) > 1 else "")))
    return out
