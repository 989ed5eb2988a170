"""Sequential traces and causal (partial-order) runs.

A causal run records every fact (place, item) as a *condition* and every
occurrence as an *event*.  Events consume, read and produce conditions;
the causal order between events follows from those edges.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .net import Marking, ModeOccurrence, Net, all_enabled, effect, fire
from .values import Value, canonical_text

__all__ = [
    "Condition", "Event", "CausalRun", "RunResult", "CausalityError",
    "record_run", "causal_order", "linearizations", "Linearizations",
    "replay", "concurrent",
]

DEADLOCK, BOUND, USER_STOP = "deadlock", "bound", "user-stop"


class CausalityError(Exception):
    pass


@dataclass(frozen=True, order=True)
class Condition:
    place: str
    item: Value
    instance: int = 0

    def text(self):
        return f"{self.place}:{canonical_text(self.item)}#{self.instance}"


@dataclass(frozen=True)
class Event:
    occurrence: ModeOccurrence
    index: int


@dataclass
class CausalRun:
    initial: list = field(default_factory=list)    # [Condition]
    events: list = field(default_factory=list)     # [Event]
    consume: list = field(default_factory=list)    # [(Condition, event index)]
    produce: list = field(default_factory=list)    # [(event index, Condition)]
    read: list = field(default_factory=list)       # [(Condition, event index)]

    @property
    def conditions(self) -> list:
        return self.initial + [c for _, c in self.produce]

    @property
    def initial_marking(self) -> Marking:
        d = {}
        for c in self.initial:
            d.setdefault(c.place, set()).add(c.item)
        return Marking(d)

    def final_conditions(self) -> list:
        consumed = {c for c, _ in self.consume}
        return [c for c in self.conditions if c not in consumed]

    def final_marking(self) -> Marking:
        d = {}
        for c in self.final_conditions():
            d.setdefault(c.place, set()).add(c.item)
        return Marking(d)


@dataclass
class RunResult:
    trace: list
    run: CausalRun
    final_marking: Marking
    reason: str

    @property
    def deadlock(self) -> bool:
        return self.reason == DEADLOCK


def _choose(policy, seed):
    if callable(policy):
        return policy
    if policy == "first":
        return lambda m, occs: 0
    if policy == "random":
        rng = random.Random(seed)
        return lambda m, occs: rng.randrange(len(occs))
    raise ValueError(f"unknown policy {policy!r}")


def record_run(net: Net, policy="first", max_events: int = 100, seed=None,
               marking: Marking | None = None) -> RunResult:
    """Fire one occurrence at a time and record the causal run.

    `policy` is ``"first"``, ``"random"`` (seeded by `seed`) or a callable
    ``(marking, occurrences) -> index or None``; returning None stops the
    run with reason ``user-stop``.
    """
    choose: Callable = _choose(policy, seed)
    m = net.initial_marking if marking is None else marking
    run = CausalRun()
    current = {}
    counts = {}

    def new_condition(p, v):
        k = counts.get((p, v), 0)
        counts[(p, v)] = k + 1
        c = Condition(p, v, k)
        current[(p, v)] = c
        return c

    for p in m:
        for v in sorted(m[p]):
            run.initial.append(new_condition(p, v))

    trace = []
    reason = BOUND
    while len(trace) < max_events:
        occs = all_enabled(net, m)
        if not occs:
            reason = DEADLOCK
            break
        i = choose(m, occs)
        if i is None:
            reason = USER_STOP
            break
        occ = occs[i]
        consumed, read, produced = effect(net, m, occ)
        e = len(run.events)
        run.events.append(Event(occ, e))
        for p in sorted(consumed):
            for v in sorted(consumed[p]):
                run.consume.append((current.pop((p, v)), e))
        reads = {}
        for p in sorted(read):
            for v in sorted(read[p]):
                reads[(p, v)] = current[(p, v)]
        for p in sorted(produced):
            for v in sorted(produced[p]):
                if (p, v) in current:
                    # idempotent produce on a held fact: retire the old instance
                    reads.pop((p, v), None)
                    run.consume.append((current.pop((p, v)), e))
                run.produce.append((e, new_condition(p, v)))
        run.read += [(c, e) for c in reads.values()]
        m = fire(net, m, occ)
        trace.append(occ)
    if len(trace) >= max_events and reason == BOUND and not all_enabled(net, m):
        reason = DEADLOCK
    return RunResult(trace, run, m, reason)


def _generating_pairs(run: CausalRun) -> set:
    producer = {c: e for e, c in run.produce}
    consumer = {c: e for c, e in run.consume}
    readers = {}
    for c, e in run.read:
        readers.setdefault(c, []).append(e)
    pairs = set()
    for c, e in consumer.items():
        if c in producer:
            pairs.add((producer[c], e))
    for c, es in readers.items():
        for e in es:
            if c in producer:
                pairs.add((producer[c], e))
            if c in consumer:
                pairs.add((e, consumer[c]))
    # a fact can only be re-created once its previous instance is gone
    for c, e in producer.items():
        if c.instance > 0:
            prev = Condition(c.place, c.item, c.instance - 1)
            if prev in consumer and consumer[prev] != e:
                pairs.add((consumer[prev], e))
    return pairs


def causal_order(run: CausalRun) -> frozenset:
    """Strict partial order over event indices as a set of pairs (i, j),
    meaning event i precedes event j."""
    n = len(run.events)
    succ = {i: set() for i in range(n)}
    for a, b in _generating_pairs(run):
        if a == b:
            raise CausalityError(f"event {a} precedes itself")
        succ[a].add(b)
    pairs = set()
    for i in range(n):
        stack, seen = list(succ[i]), set()
        while stack:
            j = stack.pop()
            if j in seen:
                continue
            seen.add(j)
            stack.extend(succ[j])
        if i in seen:
            raise CausalityError(f"cycle through event {i}")
        pairs |= {(i, j) for j in seen}
    return frozenset(pairs)


def concurrent(order: frozenset, i: int, j: int) -> bool:
    return i != j and (i, j) not in order and (j, i) not in order


class Linearizations(NamedTuple):
    sequences: list
    capped: bool


def linearizations(run: CausalRun, cap: int = 10_000) -> Linearizations:
    """Linear extensions of the causal order, at most `cap` of them."""
    order = causal_order(run)
    n = len(run.events)
    preds = [set() for _ in range(n)]
    for a, b in order:
        preds[b].add(a)
    out = []
    capped = False
    prefix, placed = [], set()

    def extend():
        nonlocal capped
        if len(prefix) == n:
            if len(out) >= cap:
                capped = True
            else:
                out.append(tuple(prefix))
            return
        for j in range(n):
            if j not in placed and preds[j] <= placed:
                prefix.append(j)
                placed.add(j)
                extend()
                placed.discard(j)
                prefix.pop()
                if capped:
                    return

    extend()
    return Linearizations(out, capped)


def replay(net: Net, run: CausalRun, sequence) -> Marking:
    """Fire the run's events in the given order from its initial marking."""
    m = run.initial_marking
    for i in sequence:
        m = fire(net, m, run.events[i].occurrence)
    return m
