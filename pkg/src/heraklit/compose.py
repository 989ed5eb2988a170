"""Modules with left/right interfaces and their composition by fusing
interface places with matching labels."""

from __future__ import annotations

from dataclasses import dataclass, replace

import networkx as nx

from .net import Arc, Marking, Net, Place, Transition, net_problems
from .signature import Signature, SortError, Structure, resolve
from .terms import term_text

__all__ = ["ModuleNet", "CompositionError", "compose", "empty_module",
           "qualify", "isomorphic", "module_problems"]


@dataclass(frozen=True)
class ModuleNet:
    net: Net
    left: tuple = ()
    right: tuple = ()
    name: str = "main"

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))


class CompositionError(Exception):
    pass


def empty_module(name="empty") -> ModuleNet:
    return ModuleNet(Net(Signature(), Structure()), name=name)


def module_problems(mod: ModuleNet) -> list:
    """Net problems plus interface discipline violations, as strings."""
    out = [str(p) for p in net_problems(mod.net)]
    for side in ("left", "right"):
        labels = getattr(mod, side)
        if len(set(labels)) != len(labels):
            out.append(f"interface {side}: duplicate label")
        for lab in labels:
            if not mod.net.has_place(lab):
                out.append(f"{lab}: interface label names no place")
    for lab in set(mod.left) & set(mod.right):
        out.append(f"{lab}: place is in both interfaces")
    return out


def qualify(module: str, name: str) -> str:
    """Prefix a name with its module, unless an earlier composition
    already did."""
    return name if "." in name else f"{module}.{name}"


def _merge_symbols(a: dict, b: dict, what: str) -> dict:
    out = dict(a)
    for k, v in b.items():
        if k in out and out[k] != v:
            raise CompositionError(f"conflicting {what} for shared symbol {k}")
        out[k] = v
    return out


def _rename(mod: ModuleNet):
    interface = set(mod.left) | set(mod.right)
    places = {p.name: (p.name if p.name in interface else qualify(mod.name, p.name))
              for p in mod.net.places}
    trans = {t.name: qualify(mod.name, t.name) for t in mod.net.transitions}
    return places, trans


def _renamed_transition(t: Transition, pmap, tmap) -> Transition:
    arcs = [Arc(pmap[a.place], a.inscription, a.mode) for a in t.arcs]
    return Transition(tmap[t.name], tuple(arcs), t.guard, t.free_vars)


def compose(a: ModuleNet, b: ModuleNet) -> ModuleNet:
    """Fuse a's right-interface places with b's left-interface places of the
    same label.  Other places and all transitions are qualified by module
    name.  Signatures and structures must agree on shared symbols."""
    sa, sb = a.net.signature, b.net.signature
    ta, tb = a.net.structure, b.net.structure
    sig = Signature(
        sorts=_merge_symbols(sa.sorts, sb.sorts, "sort declarations"),
        constants=_merge_symbols(sa.constants, sb.constants, "constant declarations"),
        functions=_merge_symbols(sa.functions, sb.functions, "function declarations"),
        static_predicates=_merge_symbols(sa.static_predicates, sb.static_predicates,
                                         "predicate declarations"),
    )
    st = Structure(
        carriers=_merge_symbols(ta.carriers, tb.carriers, "carriers"),
        constant_values=_merge_symbols(ta.constant_values, tb.constant_values,
                                       "constant interpretations"),
        function_defs=_merge_symbols(ta.function_defs, tb.function_defs,
                                     "function interpretations"),
        static_relations=_merge_symbols(ta.static_relations, tb.static_relations,
                                        "predicate interpretations"),
    )
    matched = [lab for lab in a.right if lab in b.left]
    for lab in matched:
        pa, pb = a.net.place(lab), b.net.place(lab)
        try:
            same = resolve(sig, pa.item_sort) == resolve(sig, pb.item_sort)
        except SortError as e:
            raise CompositionError(str(e)) from None
        if not same:
            raise CompositionError(f"sort mismatch on interface label {lab}")

    pa_map, ta_map = _rename(a)
    pb_map, tb_map = _rename(b)
    places = {}
    for mod, pmap in ((a, pa_map), (b, pb_map)):
        for p in mod.net.places:
            new = pmap[p.name]
            if new in places:
                if new not in matched:
                    raise CompositionError(f"duplicate place {new} after qualification")
                continue
            places[new] = Place(new, p.item_sort)
    transitions = []
    names = set()
    for mod, pmap, tmap in ((a, pa_map, ta_map), (b, pb_map, tb_map)):
        for t in mod.net.transitions:
            if tmap[t.name] in names:
                raise CompositionError(f"duplicate transition {tmap[t.name]} after qualification")
            names.add(tmap[t.name])
            transitions.append(_renamed_transition(t, pmap, tmap))
    marking = {}
    for mod, pmap in ((a, pa_map), (b, pb_map)):
        for p in mod.net.initial_marking:
            marking.setdefault(pmap[p], set()).update(mod.net.initial_marking[p])
    sig = replace(sig, dynamic_predicates={n: p.item_sort for n, p in places.items()})
    net = Net(sig, st, tuple(places.values()), tuple(transitions), Marking(marking),
              a.net.idempotent_produce or b.net.idempotent_produce)
    left = list(a.left) + [lab for lab in b.left if lab not in matched]
    right = list(b.right) + [lab for lab in a.right if lab not in matched]
    for side in (left, right):
        if len(set(side)) != len(side):
            raise CompositionError("interface label clash in composite")
    if set(left) & set(right):
        raise CompositionError("a label ends up in both interfaces")
    return ModuleNet(net, tuple(left), tuple(right), f"{a.name}_{b.name}")


def _net_graph(mod: ModuleNet) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph()
    net = mod.net
    sig = net.signature
    for p in net.places:
        side = "left" if p.name in mod.left else "right" if p.name in mod.right else None
        label = p.name if side else None
        g.add_node(("p", p.name), kind="place", sort=resolve(sig, p.item_sort),
                   marking=net.initial_marking[p.name], side=side, label=label)
    for t in net.transitions:
        g.add_node(("t", t.name), kind="transition", guard=term_text(t.guard),
                   free=tuple((n, resolve(sig, s)) for n, s in t.free_vars))
        for arc in t.arcs:
            ends = (("p", arc.place), ("t", t.name))
            if arc.mode == "produce":
                ends = ends[::-1]
            g.add_edge(*ends, mode=arc.mode, ins=term_text(arc.inscription))
    return g


def isomorphic(a: ModuleNet, b: ModuleNet) -> bool:
    """Equality of modules up to renaming of internal places and
    transitions; interface labels are kept but their order is ignored."""
    sa, sb = a.net.signature, b.net.signature
    if (replace(sa, dynamic_predicates={}) != replace(sb, dynamic_predicates={})
            or a.net.structure != b.net.structure
            or a.net.idempotent_produce != b.net.idempotent_produce
            or set(a.left) != set(b.left) or set(a.right) != set(b.right)):
        return False

    def edges_match(x, y):
        return sorted(tuple(sorted(d.items())) for d in x.values()) == \
            sorted(tuple(sorted(d.items())) for d in y.values())

    return nx.is_isomorphic(_net_graph(a), _net_graph(b),
                            node_match=lambda x, y: x == y, edge_match=edges_match)
