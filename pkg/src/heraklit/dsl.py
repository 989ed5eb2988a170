"""Text syntax for modules (``.hkt`` files): lexer, parser and canonical
printer.

Example::

    sort Client = {alice, bob};
    sort Table = {1, 2};
    place waiting : Client;
    place free : Table;
    place ready : (Client, Table);
    transition enter {
      consume waiting: c;
      consume free: t;
      produce ready: (c, t);
    }
    marking { waiting: {alice}; free: {1}; }

In terms a bare identifier is a constant when one of that name is declared
and a variable otherwise; symbol literals carry a quote (``'alice``).  In
value positions (carriers, markings, tables) bare identifiers are symbols.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

from .compose import ModuleNet, module_problems
from .net import Arc, Marking, Net, Place, Transition, CONSUME, READ, PRODUCE
from .signature import Powerset, Product, Signature, Structure, sort_text
from .terms import App, Const, Lit, SetT, TupleT, Var, term_text
from .values import (
    FALSE, TRUE, Int, SetV, Sym, Tup, canonical_text, is_identifier,
)

__all__ = ["SourceFile", "Diagnostic", "DslError", "parse", "parse_file",
           "print_module", "parse_value", "parse_marking"]

MAX_DEPTH = 64
OPTIONS = ("idempotent_produce",)


@dataclass(frozen=True)
class SourceFile:
    text: str
    origin: str = "<string>"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    line: int
    column: int
    excerpt: str = ""
    origin: str = "<string>"

    def __str__(self):
        head = f"{self.origin}:{self.line}:{self.column}: {self.severity}: {self.message}"
        if not self.excerpt:
            return head
        return f"{head}\n  {self.excerpt}\n  {' ' * (self.column - 1)}^"


class DslError(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class _Stop(Exception):
    pass


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<qident>'[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*)
  | (?P<int>[0-9]+)
  | (?P<arrow>->)
  | (?P<punct>[{}(),;:=\-])
""", re.VERBOSE)


@dataclass(frozen=True)
class Tok:
    kind: str     # ident, qident, int, punct (incl. "->"), eof
    text: str
    line: int
    col: int


class _Parser:
    def __init__(self, src: SourceFile):
        self.src = src
        self.lines = src.text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
        self.diags = []
        self.toks = self._lex(src.text)
        self.i = 0
        self.depth = 0

    # -- diagnostics -------------------------------------------------------

    def diag(self, msg, line, col, severity="error"):
        line = max(1, min(line, len(self.lines)))
        excerpt = self.lines[line - 1] if self.lines else ""
        col = max(1, min(col, len(excerpt) + 1))
        self.diags.append(Diagnostic(severity, msg, line, col, excerpt, self.src.origin))

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        self.diag(msg, tok.line, tok.col)
        raise _Stop

    # -- lexing ------------------------------------------------------------

    def _lex(self, text):
        toks = []
        pos, line, col = 0, 1, 1
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m:
                # record the error and end the token stream here
                self.diag(f"unexpected character {text[pos]!r}", line, col)
                break
            kind = m.lastgroup
            s = m.group()
            if kind not in ("ws", "comment"):
                if kind == "arrow":
                    kind = "punct"
                toks.append(Tok(kind, s, line, col))
            nl = s.count("\n")
            if nl:
                line += nl
                col = len(s) - s.rfind("\n")
            else:
                col += len(s)
            pos = m.end()
        toks.append(Tok("eof", "", line, col))
        return toks

    # -- token helpers -----------------------------------------------------

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.peek()
        self.i = min(self.i + 1, len(self.toks) - 1)
        return t

    def at(self, text, k=0):
        t = self.peek(k)
        return t.kind in ("punct", "ident") and t.text == text

    def expect(self, text):
        t = self.peek()
        if not self.at(text):
            self.fail(f"expected '{text}', found {self._describe(t)}", t)
        return self.next()

    def ident(self, what="identifier"):
        t = self.peek()
        if t.kind != "ident" or t.text in ("true", "false"):
            self.fail(f"expected {what}, found {self._describe(t)}", t)
        return self.next()

    @staticmethod
    def _describe(t):
        return "end of file" if t.kind == "eof" else f"'{t.text}'"

    def nest(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.fail("nesting too deep")

    def unnest(self):
        self.depth -= 1

    def comma_list(self, close, item):
        out = []
        if self.at(close):
            self.next()
            return out
        while True:
            out.append(item())
            if self.at(","):
                self.next()
                continue
            self.expect(close)
            return out

    # -- values and sorts --------------------------------------------------

    def value(self):
        t = self.peek()
        if t.kind == "int":
            self.next()
            return Int(int(t.text))
        if self.at("-") and self.peek(1).kind == "int":
            self.next()
            return Int(-int(self.next().text))
        if t.kind == "ident":
            self.next()
            if t.text == "true":
                return TRUE
            if t.text == "false":
                return FALSE
            return Sym(t.text)
        if t.kind == "qident":
            self.next()
            return Sym(t.text[1:])
        if self.at("(") or self.at("{"):
            self.nest()
            opening = self.next().text
            items = self.comma_list(")" if opening == "(" else "}", self.value)
            self.unnest()
            return Tup(items) if opening == "(" else SetV(items)
        self.fail(f"expected a value, found {self._describe(t)}", t)

    def sort_expr(self):
        t = self.peek()
        if self.at("powerset"):
            self.next()
            self.nest()
            s = Powerset(self.sort_expr())
            self.unnest()
            return s
        if self.at("("):
            self.next()
            self.nest()
            parts = self.comma_list(")", self.sort_expr)
            self.unnest()
            return Product(tuple(parts))
        if t.kind == "ident":
            return self.next().text
        self.fail(f"expected a sort, found {self._describe(t)}", t)

    # -- terms -------------------------------------------------------------

    def term(self):
        t = self.peek()
        if t.kind == "int" or (self.at("-") and self.peek(1).kind == "int"):
            return Lit(self.value())
        if t.kind == "qident":
            self.next()
            return Lit(Sym(t.text[1:]))
        if t.kind == "ident":
            self.next()
            if t.text == "true":
                return Lit(TRUE)
            if t.text == "false":
                return Lit(FALSE)
            if self.at("("):
                self.next()
                self.nest()
                args = self.comma_list(")", self.term)
                self.unnest()
                return App(t.text, tuple(args))
            return Var(t.text)
        if self.at("(") or self.at("{"):
            self.nest()
            opening = self.next().text
            items = self.comma_list(")" if opening == "(" else "}", self.term)
            self.unnest()
            return TupleT(tuple(items)) if opening == "(" else SetT(tuple(items))
        self.fail(f"expected a term, found {self._describe(t)}", t)

    # -- declarations ------------------------------------------------------

    def parse(self):
        d = _Decls()
        while self.peek().kind != "eof":
            self.decl(d)
        return d

    def declare(self, d, name_tok, kind):
        name = name_tok.text
        if name in d.pos:
            self.diag(f"duplicate declaration of {name}", name_tok.line, name_tok.col)
            return False
        d.pos[name] = (name_tok.line, name_tok.col)
        d.kinds[name] = kind
        return True

    def decl(self, d):
        t = self.peek()
        kw = t.text if t.kind == "ident" else None
        if kw == "module":
            self.next()
            d.name = self.ident("module name").text
            d.pos["<module>"] = (t.line, t.col)
            self.expect(";")
        elif kw == "option":
            self.next()
            o = self.ident("option name")
            if o.text not in OPTIONS:
                self.diag(f"unknown option {o.text}", o.line, o.col)
            d.options.add(o.text)
            self.expect(";")
        elif kw == "powerset":
            self.next()
            self.expect("sort")
            n = self.ident("sort name")
            self.expect("=")
            s = Powerset(self.sort_expr())
            self.expect(";")
            if self.declare(d, n, "sort"):
                d.sorts[n.text] = s
        elif kw == "sort":
            self.next()
            n = self.ident("sort name")
            if self.at(";"):
                self.next()
                if self.declare(d, n, "sort"):
                    d.sorts[n.text] = None
                return
            self.expect("=")
            if self.at("{"):
                self.next()
                items = self.comma_list("}", self.value)
                self.expect(";")
                if self.declare(d, n, "sort"):
                    d.sorts[n.text] = None
                    d.carriers[n.text] = frozenset(items)
            else:
                s = self.sort_expr()
                self.expect(";")
                if self.declare(d, n, "sort"):
                    d.sorts[n.text] = s
        elif kw == "const":
            self.next()
            n = self.ident("constant name")
            self.expect(":")
            s = self.sort_expr()
            self.expect("=")
            v = self.value()
            self.expect(";")
            if self.declare(d, n, "const"):
                d.constants[n.text] = s
                d.constant_values[n.text] = v
        elif kw == "fn":
            self.next()
            n = self.ident("function name")
            self.expect("(")
            args = tuple(self.comma_list(")", self.sort_expr))
            self.expect(":")
            res = self.sort_expr()
            self.expect("=")
            interp = self.interpretation(table=True)
            self.expect(";")
            if self.declare(d, n, "fn"):
                d.functions[n.text] = (args, res)
                d.function_defs[n.text] = interp
        elif kw == "pred":
            self.next()
            which = self.ident("'static' or 'dynamic'")
            if which.text == "static":
                n = self.ident("predicate name")
                self.expect("(")
                args = tuple(self.comma_list(")", self.sort_expr))
                self.expect("=")
                interp = self.interpretation(table=False)
                self.expect(";")
                if self.declare(d, n, "pred"):
                    d.static_predicates[n.text] = args
                    d.static_relations[n.text] = interp
            elif which.text == "dynamic":
                self.place_decl(d)
            else:
                self.fail("expected 'static' or 'dynamic'", which)
        elif kw == "place":
            self.next()
            self.place_decl(d)
        elif kw == "transition":
            self.next()
            self.transition(d)
        elif kw == "marking":
            self.next()
            self.marking_block(d.marking, d.marking_pos)
        elif kw == "interface":
            self.next()
            side = self.ident("'left' or 'right'")
            if side.text not in ("left", "right"):
                self.fail("expected 'left' or 'right'", side)
            self.expect("(")
            labels = self.comma_list(")", lambda: self.ident("place label"))
            self.expect(";")
            target = d.left if side.text == "left" else d.right
            for lab in labels:
                target.append(lab.text)
                d.label_pos.setdefault(lab.text, (lab.line, lab.col))
        else:
            self.fail(f"expected a declaration, found {self._describe(t)}", t)

    def interpretation(self, table):
        if self.peek().kind == "ident" and not self.at("true") and not self.at("false"):
            return self.next().text
        self.expect("{")
        if table:
            def entry():
                k = self.value()
                if not isinstance(k, Tup):
                    self.fail("table keys are argument tuples, e.g. (rice) -> 3")
                self.expect("->")
                return k, self.value()
            entries = self.comma_list("}", entry)
            return dict(entries)
        rows = self.comma_list("}", self.value)
        for r in rows:
            if not isinstance(r, Tup):
                self.fail("relation rows are argument tuples, e.g. (rice)")
        return frozenset(rows)

    def place_decl(self, d):
        n = self.ident("place name")
        self.expect(":")
        s = self.sort_expr()
        self.expect(";")
        if self.declare(d, n, "place"):
            d.places[n.text] = s

    def transition(self, d):
        n = self.ident("transition name")
        self.expect("{")
        arcs, free, guard = [], {}, None
        guard_tok = None
        while not self.at("}"):
            t = self.peek()
            kw = t.text if t.kind == "ident" else None
            if kw in (CONSUME, READ, PRODUCE):
                self.next()
                p = self.ident("place name")
                self.expect(":")
                term = self.term()
                self.expect(";")
                arcs.append((Arc(p.text, term, kw), (p.line, p.col)))
            elif kw == "var":
                self.next()
                v = self.ident("variable name")
                self.expect(":")
                s = self.sort_expr()
                self.expect(";")
                if v.text in free:
                    self.diag(f"variable {v.text} declared twice", v.line, v.col)
                free[v.text] = s
            elif kw == "guard":
                self.next()
                if guard is not None:
                    self.diag("transition has more than one guard", t.line, t.col)
                guard_tok = t
                guard = self.term()
                self.expect(";")
            else:
                self.fail(f"expected consume, read, produce, var or guard, "
                          f"found {self._describe(t)}", t)
        self.expect("}")
        if self.declare(d, n, "transition"):
            d.transitions[n.text] = (arcs, free, guard, guard_tok)

    def marking_block(self, marking, positions):
        self.expect("{")
        while not self.at("}"):
            p = self.ident("place name")
            self.expect(":")
            self.expect("{")
            items = self.comma_list("}", self.value)
            self.expect(";")
            if p.text in marking:
                self.diag(f"place {p.text} marked twice", p.line, p.col)
            marking[p.text] = frozenset(items)
            positions.setdefault(p.text, (p.line, p.col))
        self.expect("}")


class _Decls:
    def __init__(self):
        self.name = None
        self.options = set()
        self.pos = {}
        self.kinds = {}
        self.sorts, self.carriers = {}, {}
        self.constants, self.constant_values = {}, {}
        self.functions, self.function_defs = {}, {}
        self.static_predicates, self.static_relations = {}, {}
        self.places = {}
        self.transitions = {}
        self.marking, self.marking_pos = {}, {}
        self.left, self.right, self.label_pos = [], [], {}


def _resolve_consts(t, consts):
    if isinstance(t, Var):
        return Const(t.name) if t.name in consts else t
    if isinstance(t, App):
        return App(t.fn, tuple(_resolve_consts(a, consts) for a in t.args))
    if isinstance(t, TupleT):
        return TupleT(tuple(_resolve_consts(a, consts) for a in t.items))
    if isinstance(t, SetT):
        return SetT(tuple(_resolve_consts(a, consts) for a in t.items))
    return t


def _default_name(origin):
    stem = os.path.splitext(os.path.basename(origin))[0]
    return stem if is_identifier(stem) and "." not in stem else "main"


def _build(p: _Parser, d: _Decls) -> ModuleNet:
    consts = set(d.constants)
    sig = Signature(
        sorts=d.sorts, constants=d.constants, functions=d.functions,
        static_predicates=d.static_predicates,
        dynamic_predicates=dict(d.places),
    )
    st = Structure(carriers=d.carriers, constant_values=d.constant_values,
                   function_defs=d.function_defs, static_relations=d.static_relations)
    transitions = []
    for name, (arcs, free, guard, _) in d.transitions.items():
        transitions.append(Transition(
            name,
            tuple(Arc(a.place, _resolve_consts(a.inscription, consts), a.mode)
                  for a, _ in arcs),
            _resolve_consts(guard, consts) if guard is not None else Lit(TRUE),
            tuple(free.items()),
        ))
    net = Net(sig, st, tuple(Place(n, s) for n, s in d.places.items()),
              tuple(transitions), Marking(d.marking),
              "idempotent_produce" in d.options)
    name = d.name or _default_name(p.src.origin)
    return ModuleNet(net, tuple(d.left), tuple(d.right), name)


def _locate(d: _Decls, message: str):
    head = message.split(":", 1)[0]
    for table in (d.pos, d.marking_pos, d.label_pos):
        if head in table:
            return table[head]
    return (1, 1)


def parse(src, origin: str | None = None) -> ModuleNet:
    """Parse and check a module.  Raises DslError with diagnostics."""
    if isinstance(src, str):
        src = SourceFile(src, origin or "<string>")
    p = None
    try:
        p = _Parser(src)
        d = p.parse()
    except _Stop:
        raise DslError(p.diags if p else []) from None
    except RecursionError:
        raise DslError([Diagnostic("error", "input nested too deeply", 1, 1, "",
                                   src.origin)]) from None
    if p.diags:
        raise DslError(p.diags)
    for n in d.constants:
        if n in d.places or any(n in free for _, free, _, _ in d.transitions.values()):
            line, col = d.pos[n]
            p.diag(f"constant {n} clashes with another name", line, col)
    mod = _build(p, d)
    for msg in module_problems(mod):
        line, col = _locate(d, msg)
        p.diag(msg, line, col)
    if p.diags:
        raise DslError(p.diags)
    return mod


def parse_file(path: str) -> ModuleNet:
    with open(path, encoding="utf-8", newline="") as f:
        return parse(SourceFile(f.read(), path))


def parse_value(text: str):
    """Parse a single value literal, e.g. ``{(alice, 1), (bob, 2)}``."""
    p = None
    try:
        p = _Parser(SourceFile(text))
        v = p.value()
        if p.peek().kind != "eof":
            p.fail(f"unexpected {p._describe(p.peek())} after value")
        return v
    except _Stop:
        raise DslError(p.diags if p else []) from None


def parse_marking(text: str, net: Net | None = None, origin="<marking>") -> Marking:
    """Parse a ``marking { ... }`` block, checked against `net` if given."""
    p = None
    marking, positions = {}, {}
    try:
        p = _Parser(SourceFile(text, origin))
        if p.at("marking"):
            p.next()
        p.marking_block(marking, positions)
        if p.peek().kind != "eof":
            p.fail(f"unexpected {p._describe(p.peek())} after marking")
    except _Stop:
        raise DslError(p.diags if p else []) from None
    m = Marking(marking)
    if net is not None:
        from .signature import in_carrier
        for place in sorted(marking):
            line, col = positions[place]
            if not net.has_place(place):
                p.diag(f"unknown place {place}", line, col)
                continue
            for v in sorted(marking[place]):
                if not in_carrier(net.signature, net.structure,
                                  net.place(place).item_sort, v):
                    p.diag(f"{place}: item {canonical_text(v)} outside its sort", line, col)
    if p.diags:
        raise DslError(p.diags)
    return m


# -- printing ---------------------------------------------------------------

def _values(vs) -> str:
    return ", ".join(canonical_text(v) for v in sorted(vs))


def print_module(mod: ModuleNet) -> str:
    """Canonical text of a module; parsing it gives back an equal module."""
    net = mod.net
    sig, st = net.signature, net.structure
    blocks = []
    head = []
    if mod.name != "main":
        head.append(f"module {mod.name};")
    if net.idempotent_produce:
        head.append("option idempotent_produce;")
    blocks.append(head)

    lines = []
    for n in sorted(sig.sorts):
        s = sig.sorts[n]
        if s is None:
            if n in st.carriers:
                lines.append(f"sort {n} = {{{_values(st.carriers[n])}}};")
            else:
                lines.append(f"sort {n};")
        else:
            lines.append(f"sort {n} = {sort_text(s)};")
    blocks.append(lines)

    lines = []
    for n in sorted(sig.constants):
        v = st.constant_values.get(n)
        lines.append(f"const {n} : {sort_text(sig.constants[n])} = {canonical_text(v)};")
    blocks.append(lines)

    lines = []
    for n in sorted(sig.functions):
        args, res = sig.functions[n]
        interp = st.function_defs.get(n)
        if isinstance(interp, dict):
            body = "{" + ", ".join(f"{canonical_text(k)} -> {canonical_text(v)}"
                                   for k, v in sorted(interp.items())) + "}"
        else:
            body = interp
        lines.append(f"fn {n}({', '.join(sort_text(a) for a in args)}) : "
                     f"{sort_text(res)} = {body};")
    blocks.append(lines)

    lines = []
    for n in sorted(sig.static_predicates):
        args = sig.static_predicates[n]
        interp = st.static_relations.get(n)
        body = interp if isinstance(interp, str) else "{" + _values(interp) + "}"
        lines.append(f"pred static {n}({', '.join(sort_text(a) for a in args)}) = {body};")
    blocks.append(lines)

    blocks.append([f"place {p.name} : {sort_text(p.item_sort)};" for p in net.places])

    for t in net.transitions:
        lines = [f"transition {t.name} {{"]
        for a in t.arcs:
            lines.append(f"  {a.mode} {a.place}: {term_text(a.inscription)};")
        for n, s in t.free_vars:
            lines.append(f"  var {n} : {sort_text(s)};")
        if t.guard != Lit(TRUE):
            lines.append(f"  guard {term_text(t.guard)};")
        lines.append("}")
        blocks.append(lines)

    m = net.initial_marking
    if len(m):
        blocks.append(["marking {"] + [f"  {p}: {{{_values(m[p])}}};" for p in m] + ["}"])

    lines = []
    if mod.left:
        lines.append(f"interface left ({', '.join(mod.left)});")
    if mod.right:
        lines.append(f"interface right ({', '.join(mod.right)});")
    blocks.append(lines)

    text = "\n\n".join("\n".join(b) for b in blocks if b)
    return text + "\n" if text else ""
