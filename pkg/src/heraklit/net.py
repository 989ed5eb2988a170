"""Dynamic predicates (places), steps (transitions), markings, enabledness
and firing.

A marking assigns each place a finite *set* of items.  A transition
occurrence removes the items matched by its consume arcs, checks the items
matched by its read arcs without touching them, and adds the items of its
produce arcs.  Unless the net is in idempotent-produce mode, a produced
item must be absent from its place once the consumed items are gone
(contact-freeness), so markings stay sets.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass, field

from .signature import (
    BOOL, InfiniteCarrier, Problem, Signature, SortError, Structure, carrier,
    in_carrier, is_finite, resolve, sort_text, unify, wf_check, Product,
)
from .terms import (
    EvalError, Lit, Term, TupleT, Var, eval_term, sort_check, term_text,
    term_vars, _bind,
)
from .values import TRUE, canonical_text

__all__ = [
    "CONSUME", "READ", "PRODUCE", "Place", "Arc", "Transition", "Net",
    "Marking", "ModeOccurrence", "NetError", "NotEnabled",
    "DependentOccurrences", "EnumerationError", "net_problems",
    "transition_var_sorts", "enabled_bindings", "all_enabled", "fire",
    "is_enabled", "effect", "independent", "concurrent_step",
]

CONSUME, READ, PRODUCE = "consume", "read", "produce"
MODES = (CONSUME, READ, PRODUCE)


class NetError(Exception):
    pass


class NotEnabled(NetError):
    pass


class DependentOccurrences(NetError):
    pass


class EnumerationError(NetError, InfiniteCarrier):
    pass


@dataclass(frozen=True)
class Place:
    name: str
    item_sort: object


@dataclass(frozen=True)
class Arc:
    place: str
    inscription: Term
    mode: str

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"bad arc mode {self.mode!r}")

    @property
    def key(self):
        return (MODES.index(self.mode), self.place, term_text(self.inscription))


@dataclass(frozen=True)
class Transition:
    name: str
    arcs: tuple = ()
    guard: Term = Lit(TRUE)
    free_vars: tuple = ()   # ((name, sort), ...)

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(sorted(self.arcs, key=lambda a: a.key)))
        fv = self.free_vars.items() if isinstance(self.free_vars, Mapping) else self.free_vars
        object.__setattr__(self, "free_vars", tuple(sorted(fv)))

    def arcs_of(self, *modes):
        return [a for a in self.arcs if a.mode in modes]

    @property
    def variables(self) -> set:
        out = {n for n, _ in self.free_vars} | term_vars(self.guard)
        for a in self.arcs:
            out |= term_vars(a.inscription)
        return out

    @property
    def places(self) -> set:
        return {a.place for a in self.arcs}


class Marking(Mapping):
    """Immutable map place -> frozenset of items.  Places that are not
    listed hold no items."""

    __slots__ = ("_data", "_hash")

    def __init__(self, data=None):
        data = dict(data or {})
        self._data = {p: frozenset(v) for p, v in data.items() if v}
        self._hash = None

    def __getitem__(self, place):
        return self._data.get(place, frozenset())

    def __contains__(self, place):
        return place in self._data

    def __iter__(self):
        return iter(sorted(self._data))

    def __len__(self):
        return len(self._data)

    def __eq__(self, other):
        if isinstance(other, Marking):
            return self._data == other._data
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._data.items()))
        return self._hash

    @property
    def key(self) -> tuple:
        """Canonical key: places by name, items in value order."""
        return tuple((p, tuple(v.key for v in sorted(self._data[p])))
                     for p in sorted(self._data))

    def text(self) -> str:
        return "{" + ", ".join(
            f"{p}: {{{', '.join(canonical_text(v) for v in sorted(self._data[p]))}}}"
            for p in sorted(self._data)) + "}"

    def __repr__(self):
        return f"Marking({self.text()})"

    def replace(self, place, items) -> "Marking":
        d = dict(self._data)
        d[place] = items
        return Marking(d)


@dataclass(frozen=True)
class ModeOccurrence:
    transition: str
    binding: tuple    # ((var, Value), ...) sorted by variable name

    def __post_init__(self):
        b = self.binding.items() if isinstance(self.binding, Mapping) else self.binding
        object.__setattr__(self, "binding", tuple(sorted(b)))

    @property
    def env(self) -> dict:
        return dict(self.binding)

    @property
    def key(self):
        return (self.transition, tuple((n, v.key) for n, v in self.binding))

    def __lt__(self, other):
        return self.key < other.key

    def binding_text(self) -> str:
        return ", ".join(f"{n}={canonical_text(v)}" for n, v in self.binding)

    def text(self) -> str:
        return f"{self.transition}[{self.binding_text()}]"

    def __str__(self):
        return self.text()


@dataclass(frozen=True)
class Net:
    signature: Signature
    structure: Structure
    places: tuple = ()
    transitions: tuple = ()
    initial_marking: Marking = field(default_factory=Marking)
    idempotent_produce: bool = False
    _place_index: dict = field(init=False, compare=False, repr=False)
    _trans_index: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        places = tuple(sorted(self.places, key=lambda p: p.name))
        transitions = tuple(sorted(self.transitions, key=lambda t: t.name))
        object.__setattr__(self, "places", places)
        object.__setattr__(self, "transitions", transitions)
        if not isinstance(self.initial_marking, Marking):
            object.__setattr__(self, "initial_marking", Marking(self.initial_marking))
        object.__setattr__(self, "_place_index", {p.name: p for p in places})
        object.__setattr__(self, "_trans_index", {t.name: t for t in transitions})

    def place(self, name) -> Place:
        return self._place_index[name]

    def transition(self, name) -> Transition:
        return self._trans_index[name]

    def has_place(self, name) -> bool:
        return name in self._place_index

    def has_transition(self, name) -> bool:
        return name in self._trans_index


def _infer_pattern(sig, pattern, sort, out: dict):
    """Assign sorts to variables in matchable positions of an in-arc pattern."""
    if isinstance(pattern, Var):
        prev = out.get(pattern.name)
        if prev is None:
            out[pattern.name] = sort
        elif unify(prev, sort) is None:
            raise SortError(f"variable {pattern.name} used at sorts "
                            f"{sort_text(prev)} and {sort_text(sort)}")
    elif isinstance(pattern, TupleT) and isinstance(sort, Product) \
            and len(sort.parts) == len(pattern.items):
        for q, s in zip(pattern.items, sort.parts):
            _infer_pattern(sig, q, s, out)


def _pattern_vars(pattern) -> set:
    if isinstance(pattern, Var):
        return {pattern.name}
    if isinstance(pattern, TupleT):
        return set().union(*(_pattern_vars(q) for q in pattern.items))
    return set()


def transition_var_sorts(net: Net, t: Transition) -> dict:
    """Sorts of all variables of `t`: declared free variables plus those
    bound by matching consume/read inscriptions."""
    sig = net.signature
    out = {n: resolve(sig, s) for n, s in t.free_vars}
    for a in t.arcs_of(CONSUME, READ):
        if net.has_place(a.place):
            _infer_pattern(sig, a.inscription, resolve(sig, net.place(a.place).item_sort), out)
    return out


def net_problems(net: Net) -> list:
    """All violations of the net invariants (empty when well-formed)."""
    sig, st = net.signature, net.structure
    out = list(wf_check(sig, st))
    dyn = {p.name: p.item_sort for p in net.places}
    if dyn != dict(sig.dynamic_predicates):
        out.append(Problem("places", "places and dynamic predicates disagree"))
    for p in net.places:
        try:
            resolve(sig, p.item_sort)
        except SortError as e:
            out.append(Problem(p.name, str(e)))
    for t in net.transitions:
        out += _transition_problems(net, t)
    for p in net.initial_marking:
        if not net.has_place(p):
            out.append(Problem(p, "marking of undeclared place"))
            continue
        for v in sorted(net.initial_marking[p]):
            try:
                ok = in_carrier(sig, st, net.place(p).item_sort, v)
            except SortError:
                ok = True   # already reported on the place
            if not ok:
                out.append(Problem(p, f"sort violation: item {canonical_text(v)} "
                                      f"outside carrier of {sort_text(net.place(p).item_sort)}"))
    return out


def _transition_problems(net, t):
    sig = net.signature
    out = []
    names = [n for n, _ in t.free_vars]
    if len(set(names)) != len(names):
        out.append(Problem(t.name, "duplicate free variable"))
    for n, s in t.free_vars:
        try:
            if not is_finite(sig, s):
                out.append(Problem(t.name, f"free variable {n} has infinite sort {sort_text(s)}"))
        except SortError as e:
            out.append(Problem(t.name, str(e)))
    for a in t.arcs:
        if not net.has_place(a.place):
            out.append(Problem(t.name, f"arc to undeclared place {a.place}"))
    try:
        var_sorts = transition_var_sorts(net, t)
    except SortError as e:
        return out + [Problem(t.name, str(e))]
    bindable = {n for n, _ in t.free_vars}
    for a in t.arcs_of(CONSUME, READ):
        bindable |= _pattern_vars(a.inscription)
    for v in sorted(t.variables - bindable):
        out.append(Problem(t.name, f"unbound variable {v}"))
    if t.variables - bindable:
        return out
    for a in t.arcs:
        if not net.has_place(a.place):
            continue
        try:
            s = sort_check(a.inscription, sig, var_sorts)
            want = resolve(sig, net.place(a.place).item_sort)
            if unify(s, want) is None:
                out.append(Problem(t.name, f"argument sort mismatch: {a.mode} {a.place}: "
                                           f"{term_text(a.inscription)} has sort {sort_text(s)}, "
                                           f"place holds {sort_text(want)}"))
        except SortError as e:
            out.append(Problem(t.name, str(e)))
    try:
        g = sort_check(t.guard, sig, var_sorts)
        if g != BOOL:
            out.append(Problem(t.name, f"guard has sort {sort_text(g)}, not Bool"))
    except SortError as e:
        out.append(Problem(t.name, str(e)))
    return out


def _get_transition(net, t):
    return net.transition(t) if isinstance(t, str) else t


def effect(net: Net, m: Marking, occ: ModeOccurrence):
    """Evaluate an occurrence against a marking.

    Returns ``(consumed, read, produced)`` as dicts place -> set of items,
    or raises NotEnabled naming the first violated condition.
    """
    t = net.transition(occ.transition)
    env = occ.env
    if set(env) != t.variables:
        raise NotEnabled(f"{occ}: binding does not cover exactly the variables of {t.name}")
    return _effect(net, m, t, env)


def _effect(net, m, t, env):
    sig, st = net.signature, net.structure
    for n, s in t.free_vars:
        if not in_carrier(sig, st, s, env[n]):
            raise NotEnabled(f"{t.name}: {n}={canonical_text(env[n])} outside {sort_text(s)}")
    consumed, read, produced = {}, {}, {}
    taken = {}
    for a in t.arcs:
        v = eval_term(a.inscription, st, env)
        if a.mode == PRODUCE:
            if not in_carrier(sig, st, net.place(a.place).item_sort, v):
                raise EvalError(f"{t.name}: produced item {canonical_text(v)} lies outside "
                                f"the carrier of place {a.place}")
            bucket = produced.setdefault(a.place, [])
            if v in bucket and not net.idempotent_produce:
                raise NotEnabled(f"{t.name}: {a.place} would receive {canonical_text(v)} twice")
            bucket.append(v)
            continue
        if v not in m[a.place]:
            raise NotEnabled(f"{t.name}: {canonical_text(v)} is not in {a.place}")
        seen = taken.setdefault(a.place, set())
        if v in seen:
            raise NotEnabled(f"{t.name}: two arcs on {a.place} match the same item "
                             f"{canonical_text(v)}")
        seen.add(v)
        (consumed if a.mode == CONSUME else read).setdefault(a.place, set()).add(v)
    guard = eval_term(t.guard, st, env)
    if guard != TRUE:
        raise NotEnabled(f"{t.name}: guard is {canonical_text(guard)}")
    if not net.idempotent_produce:
        for p, items in produced.items():
            rest = m[p] - consumed.get(p, set())
            for v in items:
                if v in rest:
                    raise NotEnabled(f"{t.name}: contact, {canonical_text(v)} already in {p}")
    return consumed, read, {p: set(v) for p, v in produced.items()}


def is_enabled(net: Net, m: Marking, occ: ModeOccurrence) -> bool:
    try:
        effect(net, m, occ)
    except NotEnabled:
        return False
    return True


def enabled_bindings(net: Net, m: Marking, t) -> list:
    """All enabled occurrences of transition `t` at marking `m`, sorted."""
    t = _get_transition(net, t)
    sig, st = net.signature, net.structure
    in_arcs = t.arcs_of(CONSUME, READ)
    var_sorts = transition_var_sorts(net, t)
    found = set()

    def finish(env):
        rest = sorted(n for n in var_sorts if n not in env)
        pools = []
        for n in rest:
            try:
                pools.append(sorted(carrier(sig, st, var_sorts[n])))
            except InfiniteCarrier:
                raise EnumerationError(
                    f"{t.name}: free variable {n} ranges over infinite sort "
                    f"{sort_text(var_sorts[n])}") from None
        for combo in itertools.product(*pools):
            full = dict(env)
            full.update(zip(rest, combo))
            try:
                _effect(net, m, t, full)
            except NotEnabled:
                continue
            found.add(ModeOccurrence(t.name, full))

    def search(i, env, used):
        if i == len(in_arcs):
            finish(env)
            return
        a = in_arcs[i]
        for item in sorted(m[a.place]):
            if item in used.get(a.place, ()):
                continue
            env2, _ = _bind(a.inscription, item, env, st)
            if env2 is None:
                continue
            used2 = dict(used)
            used2[a.place] = used.get(a.place, frozenset()) | {item}
            search(i + 1, env2, used2)

    search(0, {}, {})
    return sorted(found)


def all_enabled(net: Net, m: Marking) -> list:
    """Enabled occurrences of every transition, in transition-name then
    binding order."""
    out = []
    for t in net.transitions:
        out += enabled_bindings(net, m, t)
    return out


def _apply(m, consumed, produced):
    d = {p: set(m[p]) for p in m}
    for p, items in consumed.items():
        d[p] -= items
    for p, items in produced.items():
        d.setdefault(p, set()).update(items)
    return Marking(d)


def fire(net: Net, m: Marking, occ: ModeOccurrence) -> Marking:
    consumed, _, produced = effect(net, m, occ)
    return _apply(m, consumed, produced)


def independent(net: Net, m: Marking, o1: ModeOccurrence, o2: ModeOccurrence) -> bool:
    """Whether two occurrences enabled at `m` can fire in either order with
    the same result."""
    c1, r1, p1 = effect(net, m, o1)
    c2, r2, p2 = effect(net, m, o2)

    def meets(x, y):
        return any(x[p] & y.get(p, set()) for p in x)

    if meets(c1, c2) or meets(c1, r2) or meets(c2, r1):
        return False
    # a consumed item that the other step puts back would make the order matter
    if meets(c1, p2) or meets(c2, p1):
        return False
    if not net.idempotent_produce and meets(p1, p2):
        return False
    return True


def concurrent_step(net: Net, m: Marking, occs) -> Marking:
    occs = sorted(occs)
    for o in occs:
        effect(net, m, o)
    for a, b in itertools.combinations(occs, 2):
        if not independent(net, m, a, b):
            raise DependentOccurrences(f"{a} and {b} are not independent")
    for o in occs:
        m = fire(net, m, o)
    return m
