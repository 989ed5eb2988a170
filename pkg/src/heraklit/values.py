"""Items that predicates apply to: symbols, integers, booleans, tuples
and finite sets, together with the elementary builtin operations.

Every value carries a precomputed sort key, so values of different
variants compare by variant rank first and then structurally.  Sets are
plain sets (no multiplicities) and print in that order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable

__all__ = [
    "Value", "Sym", "Int", "Bool", "Tup", "SetV", "TRUE", "FALSE",
    "compare", "canonical_text", "builtin_apply", "BUILTINS",
    "BuiltinError", "value", "is_identifier", "is_builtin", "builtin_arity",
    "BOOL_CARRIER",
]

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*\Z")
RESERVED = frozenset({"true", "false"})

# variant ranks
_SYM, _INT, _BOOL, _TUP, _SET = range(5)


def is_identifier(name: str) -> bool:
    return bool(IDENT_RE.match(name)) and name not in RESERVED


@total_ordering
class Value:
    """Base of all item values.  Instances are immutable."""

    __slots__ = ()

    @property
    def key(self) -> tuple:
        raise NotImplementedError

    def __lt__(self, other):
        if not isinstance(other, Value):
            return NotImplemented
        return self.key < other.key

    def __str__(self):
        return canonical_text(self)


@dataclass(frozen=True, eq=True, order=False, repr=False)
class Sym(Value):
    name: str
    _key: tuple = field(init=False, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.name, str) or not is_identifier(self.name):
            raise ValueError(f"invalid symbol name {self.name!r}")
        object.__setattr__(self, "_key", (_SYM, self.name))

    @property
    def key(self):
        return self._key

    def __repr__(self):
        return f"Sym({self.name!r})"


@dataclass(frozen=True, eq=True, order=False, repr=False)
class Int(Value):
    n: int
    _key: tuple = field(init=False, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if type(self.n) is not int:
            raise TypeError(f"Int needs a Python int, got {type(self.n).__name__}")
        object.__setattr__(self, "_key", (_INT, self.n))

    @property
    def key(self):
        return self._key

    def __repr__(self):
        return f"Int({self.n})"


@dataclass(frozen=True, eq=True, order=False, repr=False)
class Bool(Value):
    b: bool
    _key: tuple = field(init=False, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if type(self.b) is not bool:
            raise TypeError("Bool needs a Python bool")
        object.__setattr__(self, "_key", (_BOOL, self.b))

    @property
    def key(self):
        return self._key

    def __repr__(self):
        return f"Bool({self.b})"


@dataclass(frozen=True, eq=True, order=False, repr=False)
class Tup(Value):
    items: tuple
    _key: tuple = field(init=False, compare=False, hash=False, repr=False)

    def __init__(self, items: Iterable[Value] = ()):
        items = tuple(items)
        for x in items:
            if not isinstance(x, Value):
                raise TypeError(f"tuple component is not a Value: {x!r}")
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "_key", (_TUP, tuple(x.key for x in items)))

    @property
    def key(self):
        return self._key

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __repr__(self):
        return f"Tup({list(self.items)!r})"


@dataclass(frozen=True, eq=True, order=False, repr=False)
class SetV(Value):
    elems: frozenset
    _key: tuple = field(init=False, compare=False, hash=False, repr=False)

    def __init__(self, elems: Iterable[Value] = ()):
        elems = frozenset(elems)
        for x in elems:
            if not isinstance(x, Value):
                raise TypeError(f"set element is not a Value: {x!r}")
        object.__setattr__(self, "elems", elems)
        ordered = sorted(x.key for x in elems)
        object.__setattr__(self, "_key", (_SET, tuple(ordered)))

    @property
    def key(self):
        return self._key

    def sorted(self) -> list:
        return sorted(self.elems)

    def __len__(self):
        return len(self.elems)

    def __iter__(self):
        return iter(self.sorted())

    def __contains__(self, x):
        return x in self.elems

    def __repr__(self):
        return f"SetV({self.sorted()!r})"


TRUE = Bool(True)
FALSE = Bool(False)
BOOL_CARRIER = (FALSE, TRUE)


def value(x) -> Value:
    """Convert plain Python data into a Value.

    str -> Sym, bool -> Bool, int -> Int, tuple/list -> Tup,
    set/frozenset -> SetV.  Values pass through unchanged.
    """
    if isinstance(x, Value):
        return x
    if isinstance(x, bool):
        return Bool(x)
    if isinstance(x, int):
        return Int(x)
    if isinstance(x, str):
        return Sym(x)
    if isinstance(x, (tuple, list)):
        return Tup(value(y) for y in x)
    if isinstance(x, (set, frozenset)):
        return SetV(value(y) for y in x)
    raise TypeError(f"cannot convert {x!r} to a Value")


def compare(a: Value, b: Value) -> int:
    """Three-way comparison: -1, 0 or 1."""
    ka, kb = a.key, b.key
    return (ka > kb) - (ka < kb)


def canonical_text(v: Value) -> str:
    if isinstance(v, Sym):
        return v.name
    if isinstance(v, Bool):
        return "true" if v.b else "false"
    if isinstance(v, Int):
        return str(v.n)
    if isinstance(v, Tup):
        return "(" + ", ".join(canonical_text(x) for x in v.items) + ")"
    if isinstance(v, SetV):
        return "{" + ", ".join(canonical_text(x) for x in v.sorted()) + "}"
    raise TypeError(f"not a Value: {v!r}")


class BuiltinError(Exception):
    """Raised when a builtin gets the wrong number or kind of arguments."""

    def __init__(self, kind: str, builtin: str, index: int | None, detail: str):
        self.kind = kind
        self.builtin = builtin
        self.index = index
        where = f" argument {index}" if index is not None else ""
        super().__init__(f"{kind}: {builtin}{where}: {detail}")


def _need(name, args, i, cls):
    if not isinstance(args[i], cls):
        raise BuiltinError(
            "kind-mismatch", name, i,
            f"expected {cls.__name__}, got {canonical_text(args[i])}")
    return args[i]


def _sets(name, args):
    return [_need(name, args, i, SetV).elems for i in range(len(args))]


def _ints(name, args):
    return [_need(name, args, i, Int).n for i in range(len(args))]


def _bools(name, args):
    return [_need(name, args, i, Bool).b for i in range(len(args))]


def _proj(i):
    def apply(name, args):
        t = _need(name, args, 0, Tup)
        if not 1 <= i <= len(t.items):
            raise BuiltinError("kind-mismatch", name, 0,
                               f"tuple of length {len(t.items)} has no component {i}")
        return t.items[i - 1]
    return apply


# name -> (arity or None for variadic, implementation)
_TABLE = {
    "union": (2, lambda n, a: SetV(_sets(n, a)[0] | _sets(n, a)[1])),
    "intersect": (2, lambda n, a: SetV(_sets(n, a)[0] & _sets(n, a)[1])),
    "diff": (2, lambda n, a: SetV(_sets(n, a)[0] - _sets(n, a)[1])),
    "elem": (2, lambda n, a: Bool(a[0] in _need(n, a, 1, SetV).elems)),
    "subset": (2, lambda n, a: Bool(_sets(n, a)[0] <= _sets(n, a)[1])),
    "card": (1, lambda n, a: Int(len(_sets(n, a)[0]))),
    "not_empty": (1, lambda n, a: Bool(bool(_sets(n, a)[0]))),
    "tuple_make": (None, lambda n, a: Tup(a)),
    "eq": (2, lambda n, a: Bool(a[0] == a[1])),
    "neq": (2, lambda n, a: Bool(a[0] != a[1])),
    "add": (2, lambda n, a: Int(sum(_ints(n, a)))),
    "sub": (2, lambda n, a: Int(_ints(n, a)[0] - _ints(n, a)[1])),
    "mul": (2, lambda n, a: Int(_ints(n, a)[0] * _ints(n, a)[1])),
    "lt": (2, lambda n, a: Bool(_ints(n, a)[0] < _ints(n, a)[1])),
    "leq": (2, lambda n, a: Bool(_ints(n, a)[0] <= _ints(n, a)[1])),
    "and": (2, lambda n, a: Bool(all(_bools(n, a)))),
    "or": (2, lambda n, a: Bool(any(_bools(n, a)))),
    "not": (1, lambda n, a: Bool(not _bools(n, a)[0])),
}

PROJ_RE = re.compile(r"proj_([1-9][0-9]*)\Z")

BUILTINS = frozenset(_TABLE)


def is_builtin(name: str) -> bool:
    return name in _TABLE or bool(PROJ_RE.match(name))


def builtin_arity(name: str) -> int | None:
    if PROJ_RE.match(name):
        return 1
    return _TABLE[name][0]


def builtin_apply(op: str, args) -> Value:
    """Apply the builtin named `op` to a sequence of values."""
    args = list(args)
    m = PROJ_RE.match(op)
    if m:
        arity, impl = 1, _proj(int(m.group(1)))
    elif op in _TABLE:
        arity, impl = _TABLE[op]
    else:
        raise BuiltinError("unknown-builtin", op, None, "no such builtin")
    if arity is not None and len(args) != arity:
        raise BuiltinError("arity-mismatch", op, None,
                           f"expected {arity} arguments, got {len(args)}")
    for i, a in enumerate(args):
        if not isinstance(a, Value):
            raise BuiltinError("kind-mismatch", op, i, f"not a Value: {a!r}")
    return impl(op, args)
