"""JSON and DOT renderings of run reports, causal runs and state spaces."""

from __future__ import annotations

import json

from .net import Marking, ModeOccurrence, fire
from .runs import CausalRun, RunResult
from .statespace import ReachabilityGraph
from .values import canonical_text

__all__ = ["occurrence_json", "marking_json", "report_json", "report_text",
           "graph_json", "graph_dot", "run_dot", "trace_dot", "dumps"]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def occurrence_json(occ: ModeOccurrence) -> dict:
    return {"transition": occ.transition,
            "binding": {n: canonical_text(v) for n, v in occ.binding}}


def marking_json(m: Marking) -> dict:
    return {p: [canonical_text(v) for v in sorted(m[p])] for p in m}


def report_json(res: RunResult) -> dict:
    return {
        "trace": [occurrence_json(o) for o in res.trace],
        "final_marking": marking_json(res.final_marking),
        "reason": res.reason,
        "events": len(res.run.events),
        "conditions": len(res.run.conditions),
    }


def report_text(res: RunResult) -> str:
    lines = ["trace:"]
    if not res.trace:
        lines.append("  (empty)")
    for i, o in enumerate(res.trace, 1):
        lines.append(f"  {i}. {o.text()}")
    lines.append("final marking:")
    m = res.final_marking
    if not len(m):
        lines.append("  (empty)")
    for p in m:
        lines.append(f"  {p}: {{{', '.join(canonical_text(v) for v in sorted(m[p]))}}}")
    lines.append(f"reason: {res.reason}")
    lines.append(f"events: {len(res.run.events)}, conditions: {len(res.run.conditions)}")
    return "\n".join(lines) + "\n"


def graph_json(g: ReachabilityGraph) -> dict:
    return {
        "nodes": [{"id": i, "marking": marking_json(m)} for i, m in enumerate(g.nodes)],
        "edges": [{"from": a, "to": b, "transition": occ.transition,
                   "binding": {n: canonical_text(v) for n, v in occ.binding}}
                  for a, occ, b in g.edges],
        "root": g.root,
        "truncated": g.truncated,
    }


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_dot(g: ReachabilityGraph, name="statespace") -> str:
    out = [f"digraph {_q(name)} {{", "  node [shape=box];"]
    for i, m in enumerate(g.nodes):
        extra = ", penwidth=2" if i == g.root else ""
        out.append(f"  n{i} [label={_q(m.text())}{extra}];")
    for a, occ, b in g.edges:
        out.append(f"  n{a} -> n{b} [label={_q(occ.text())}];")
    out.append("}")
    return "\n".join(out) + "\n"


def run_dot(run: CausalRun, name="run") -> str:
    out = [f"digraph {_q(name)} {{", "  rankdir=LR;"]
    cid = {}
    for c in run.conditions:
        cid[c] = f"c{len(cid)}"
        out.append(f"  {cid[c]} [shape=ellipse, label="
                   f"{_q(c.place + ': ' + canonical_text(c.item))}];")
    for ev in run.events:
        out.append(f"  e{ev.index} [shape=box, label={_q(ev.occurrence.text())}];")
    for c, e in run.consume:
        out.append(f"  {cid[c]} -> e{e};")
    for e, c in run.produce:
        out.append(f"  e{e} -> {cid[c]};")
    for c, e in run.read:
        out.append(f"  {cid[c]} -> e{e} [style=dashed, arrowhead=none];")
    out.append("}")
    return "\n".join(out) + "\n"


def trace_dot(net, res: RunResult, name="trace") -> str:
    """The recorded trace as a path of markings."""
    out = [f"digraph {_q(name)} {{", "  node [shape=box];"]
    m = res.run.initial_marking
    out.append(f"  s0 [label={_q(m.text())}];")
    for i, occ in enumerate(res.trace, 1):
        m = fire(net, m, occ)
        out.append(f"  s{i} [label={_q(m.text())}];")
        out.append(f"  s{i - 1} -> s{i} [label={_q(occ.text())}];")
    out.append("}")
    return "\n".join(out) + "\n"
