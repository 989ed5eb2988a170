"""Terms over a signature: sort checking, evaluation and matching."""

from __future__ import annotations

from dataclasses import dataclass

from .signature import (
    ANY, BOOL, INT, Powerset, Product, Signature, SortError, Structure,
    resolve, sort_of_value, sort_text, unify,
)
from .values import (
    Bool, BuiltinError, SetV, Sym, Tup, Value, builtin_apply,
    canonical_text, is_builtin, PROJ_RE,
)

__all__ = [
    "Term", "Var", "Const", "App", "TupleT", "SetT", "Lit", "lit",
    "term_vars", "term_text", "sort_check", "eval_term", "match_term",
    "DEFERRED", "EvalError",
]


class Term:
    __slots__ = ()

    def __str__(self):
        return term_text(self)


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class App(Term):
    fn: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class TupleT(Term):
    items: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class SetT(Term):
    items: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class Lit(Term):
    """An atomic literal.  Compound values are written with TupleT/SetT
    (see `lit`) so that every term has exactly one textual form."""
    value: Value

    def __post_init__(self):
        if isinstance(self.value, (Tup, SetV)):
            raise TypeError("Lit holds atoms only; use lit() for compound values")


def lit(v: Value) -> Term:
    """Canonical term denoting the value `v`."""
    if isinstance(v, Tup):
        return TupleT(tuple(lit(x) for x in v.items))
    if isinstance(v, SetV):
        return SetT(tuple(lit(x) for x in v.sorted()))
    return Lit(v)


class EvalError(Exception):
    pass


class _Deferred:
    def __repr__(self):
        return "DEFERRED"


DEFERRED = _Deferred()


def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        return set().union(*(term_vars(a) for a in t.args))
    if isinstance(t, (TupleT, SetT)):
        return set().union(*(term_vars(a) for a in t.items))
    return set()


def term_text(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, App):
        return t.fn + "(" + ", ".join(term_text(a) for a in t.args) + ")"
    if isinstance(t, TupleT):
        return "(" + ", ".join(term_text(a) for a in t.items) + ")"
    if isinstance(t, SetT):
        return "{" + ", ".join(term_text(a) for a in t.items) + "}"
    if isinstance(t, Lit):
        v = t.value
        return "'" + v.name if isinstance(v, Sym) else canonical_text(v)
    raise TypeError(f"not a term: {t!r}")


def _mismatch(t, got, want):
    return SortError(f"argument sort mismatch in {term_text(t)}: "
                     f"{sort_text(got)} where {sort_text(want)} expected")


def sort_check(t: Term, sig: Signature, var_sorts: dict) -> object:
    """Return the (resolved) sort of `t`, raising SortError otherwise."""
    if isinstance(t, Var):
        if t.name not in var_sorts:
            raise SortError(f"unbound variable {t.name}")
        return resolve(sig, var_sorts[t.name])
    if isinstance(t, Const):
        if t.name not in sig.constants:
            raise SortError(f"unknown symbol {t.name}")
        return resolve(sig, sig.constants[t.name])
    if isinstance(t, Lit):
        return sort_of_value(t.value)
    if isinstance(t, TupleT):
        return Product(tuple(sort_check(a, sig, var_sorts) for a in t.items))
    if isinstance(t, SetT):
        s = ANY
        for a in t.items:
            sa = sort_check(a, sig, var_sorts)
            u = unify(s, sa)
            if u is None:
                raise _mismatch(t, sa, s)
            s = u
        return Powerset(s)
    if isinstance(t, App):
        arg_sorts = [sort_check(a, sig, var_sorts) for a in t.args]
        if t.fn in sig.functions:
            params, res = sig.functions[t.fn]
            _check_args(t, sig, arg_sorts, params)
            return resolve(sig, res)
        if t.fn in sig.static_predicates:
            _check_args(t, sig, arg_sorts, sig.static_predicates[t.fn])
            return BOOL
        if is_builtin(t.fn):
            return _builtin_sort(t, arg_sorts)
        raise SortError(f"unknown symbol {t.fn}")
    raise TypeError(f"not a term: {t!r}")


def _check_args(t, sig, arg_sorts, params):
    if len(arg_sorts) != len(params):
        raise SortError(f"arity mismatch in {term_text(t)}: "
                        f"{t.fn} takes {len(params)} arguments, got {len(arg_sorts)}")
    for got, want in zip(arg_sorts, params):
        want = resolve(sig, want)
        if unify(got, want) is None:
            raise _mismatch(t, got, want)


def _builtin_sort(t: App, arg_sorts: list):
    fn, n = t.fn, len(arg_sorts)

    def arity(k):
        if n != k:
            raise SortError(f"arity mismatch in {term_text(t)}: "
                            f"{fn} takes {k} arguments, got {n}")

    def want(i, s):
        u = unify(arg_sorts[i], s)
        if u is None:
            raise _mismatch(t, arg_sorts[i], s)
        return u

    def want_set(i):
        s = arg_sorts[i]
        if isinstance(s, Powerset):
            return s
        if s == ANY:
            return Powerset(ANY)
        raise _mismatch(t, s, Powerset(ANY))

    m = PROJ_RE.match(fn)
    if m:
        arity(1)
        s = arg_sorts[0]
        i = int(m.group(1))
        if not isinstance(s, Product) or i > len(s.parts):
            raise _mismatch(t, s, Product((ANY,) * i))
        return s.parts[i - 1]
    if fn in ("union", "intersect", "diff"):
        arity(2)
        a, b = want_set(0), want_set(1)
        u = unify(a, b)
        if u is None:
            raise _mismatch(t, b, a)
        return u
    if fn == "subset":
        arity(2)
        if unify(want_set(0), want_set(1)) is None:
            raise _mismatch(t, arg_sorts[1], arg_sorts[0])
        return BOOL
    if fn == "elem":
        arity(2)
        s = want_set(1)
        if unify(arg_sorts[0], s.elem) is None:
            raise _mismatch(t, arg_sorts[0], s.elem)
        return BOOL
    if fn == "card":
        arity(1)
        want_set(0)
        return INT
    if fn == "not_empty":
        arity(1)
        want_set(0)
        return BOOL
    if fn == "tuple_make":
        return Product(tuple(arg_sorts))
    if fn in ("eq", "neq"):
        arity(2)
        if unify(arg_sorts[0], arg_sorts[1]) is None:
            raise _mismatch(t, arg_sorts[1], arg_sorts[0])
        return BOOL
    if fn in ("add", "sub", "mul"):
        arity(2)
        want(0, INT), want(1, INT)
        return INT
    if fn in ("lt", "leq"):
        arity(2)
        want(0, INT), want(1, INT)
        return BOOL
    if fn in ("and", "or"):
        arity(2)
        want(0, BOOL), want(1, BOOL)
        return BOOL
    if fn == "not":
        arity(1)
        want(0, BOOL)
        return BOOL
    raise SortError(f"unknown symbol {fn}")


def eval_term(t: Term, st: Structure, env: dict) -> Value:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise EvalError(f"unbound variable {t.name}") from None
    if isinstance(t, Lit):
        return t.value
    if isinstance(t, Const):
        try:
            return st.constant_values[t.name]
        except KeyError:
            raise EvalError(f"uninterpreted constant {t.name}") from None
    if isinstance(t, TupleT):
        return Tup(eval_term(a, st, env) for a in t.items)
    if isinstance(t, SetT):
        return SetV(eval_term(a, st, env) for a in t.items)
    if isinstance(t, App):
        args = [eval_term(a, st, env) for a in t.args]
        try:
            if t.fn in st.function_defs:
                d = st.function_defs[t.fn]
                if isinstance(d, str):
                    return builtin_apply(d, args)
                key = Tup(args)
                if key not in d:
                    raise EvalError(f"table miss: {t.fn}{canonical_text(key)} "
                                    "is outside the table's domain")
                return d[key]
            if t.fn in st.static_relations:
                r = st.static_relations[t.fn]
                if isinstance(r, str):
                    return builtin_apply(r, args)
                return Bool(Tup(args) in r)
            return builtin_apply(t.fn, args)
        except BuiltinError as e:
            raise EvalError(str(e)) from e
    raise TypeError(f"not a term: {t!r}")


def _bind(p: Term, v: Value, env: dict, st: Structure):
    """Structural matching.  Returns (env or None, deferred flag); parts that
    cannot be matched structurally are skipped and reported as deferred."""
    if isinstance(p, Var):
        if p.name in env:
            return (env if env[p.name] == v else None), False
        e = dict(env)
        e[p.name] = v
        return e, False
    if isinstance(p, TupleT):
        if not isinstance(v, Tup) or len(v.items) != len(p.items):
            return None, False
        deferred = False
        for q, w in zip(p.items, v.items):
            env, d = _bind(q, w, env, st)
            if env is None:
                return None, False
            deferred |= d
        return env, deferred
    if isinstance(p, (App, SetT)) and not term_vars(p) <= env.keys():
        return env, True
    return (env if eval_term(p, st, env) == v else None), False


def match_term(pattern: Term, v: Value, env: dict, st: Structure | None = None):
    """All minimal extensions of `env` under which `pattern` evaluates to `v`.

    Returns a list (empty on failure), or DEFERRED when some function
    application or set term has unbound variables and so can only be
    checked by evaluation once the rest of the binding is known.
    """
    st = st if st is not None else Structure()
    e, deferred = _bind(pattern, v, dict(env), st)
    if e is None:
        return []
    if deferred:
        return DEFERRED
    return [e]
