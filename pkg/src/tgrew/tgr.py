"""The .tgr document format: term graphs, rules, systems, and scripts.

Grammar (``#`` starts a line comment)::

    document   := item*
    item       := termgraph | rule | grs | script
    termgraph  := "termgraph" NAME "{" "root" NODE ";" nodeline* "}"
    rule       := "rule" NAME "{" "lhs" NODE ";" "rhs" NODE ";" nodeline* "}"
    grs        := "grs" NAME "{" ("use" NAME ";")* "}"
    script     := "script" NAME "{" ("step" RULENAME "at" POSITION ";")* "}"
    nodeline   := NODE ":" SYMBOL ("(" NODE ("," NODE)* ")")? ";"
    POSITION   := "[" (NAT ("," NAT)*)? "]"

Variables are ``$``-prefixed, the hole symbol is spelled ``bot``.  The
signature is inferred from use; inconsistent arities are an error at the
offending line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .core import (
    ArityMismatch,
    Signature,
    TermGraph,
    TermGraphError,
    canonicalize,
    validate,
)
from .rewrite import Grs, Rule, Script, validate_rule


class ParseError(TermGraphError):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


_TOKEN = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>\#[^\n]*)
      | (?P<nat>\d+)
      | (?P<ident>\$?[A-Za-z_][A-Za-z0-9_]*)
      | (?P<punct>[{}();:,\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    return tokens


@dataclass
class Document:
    """Named definitions from one or more .tgr sources."""

    graphs: dict[str, TermGraph] = field(default_factory=dict)
    rules: dict[str, Rule] = field(default_factory=dict)
    systems: dict[str, Grs] = field(default_factory=dict)
    scripts: dict[str, Script] = field(default_factory=dict)
    signature: Signature = field(default_factory=Signature)


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = last.col + len(last.text) if last else 1
            return ParseError(message + " (at end of input)", line, col)
        return ParseError(f"{message}, got {tok.text!r}", tok.line, tok.col)

    def take(self, kind: str | None = None, text: str | None = None) -> _Token:
        tok = self.peek()
        expect = text or kind
        if tok is None or (kind and tok.kind != kind) or (text and tok.text != text):
            raise self.error(f"expected {expect!r}")
        self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def ident(self) -> _Token:
        return self.take("ident")

    def parse_document(self) -> list[tuple]:
        items = []
        while self.peek() is not None:
            tok = self.peek()
            if tok.text == "termgraph":
                items.append(self.parse_termgraph())
            elif tok.text == "rule":
                items.append(self.parse_rule())
            elif tok.text == "grs":
                items.append(self.parse_grs())
            elif tok.text == "script":
                items.append(self.parse_script())
            else:
                raise self.error("expected 'termgraph', 'rule', 'grs' or 'script'")
        return items

    def parse_nodelines(self) -> dict[str, tuple[str, tuple[str, ...], int, int]]:
        table: dict[str, tuple[str, tuple[str, ...], int, int]] = {}
        while not self.at("}"):
            node = self.ident()
            self.take(text=":")
            symbol = self.ident()
            successors: list[str] = []
            if self.at("("):
                self.take(text="(")
                successors.append(self.ident().text)
                while self.at(","):
                    self.take(text=",")
                    successors.append(self.ident().text)
                self.take(text=")")
            self.take(text=";")
            if node.text in table:
                raise ParseError(f"node {node.text!r} defined twice", node.line, node.col)
            table[node.text] = (symbol.text, tuple(successors), symbol.line, symbol.col)
        return table

    def parse_termgraph(self):
        self.take(text="termgraph")
        name = self.ident()
        self.take(text="{")
        self.take(text="root")
        root = self.ident()
        self.take(text=";")
        table = self.parse_nodelines()
        self.take(text="}")
        return ("termgraph", name, root.text, table)

    def parse_rule(self):
        self.take(text="rule")
        name = self.ident()
        self.take(text="{")
        self.take(text="lhs")
        lhs = self.ident()
        self.take(text=";")
        self.take(text="rhs")
        rhs = self.ident()
        self.take(text=";")
        table = self.parse_nodelines()
        self.take(text="}")
        return ("rule", name, lhs.text, rhs.text, table)

    def parse_grs(self):
        self.take(text="grs")
        name = self.ident()
        self.take(text="{")
        uses = []
        while self.at("use"):
            self.take(text="use")
            uses.append(self.ident())
            self.take(text=";")
        self.take(text="}")
        return ("grs", name, uses)

    def parse_script(self):
        self.take(text="script")
        name = self.ident()
        self.take(text="{")
        entries = []
        while self.at("step"):
            self.take(text="step")
            rule = self.ident()
            self.take(text="at")
            self.take(text="[")
            pos: list[int] = []
            if not self.at("]"):
                pos.append(int(self.take("nat").text))
                while self.at(","):
                    self.take(text=",")
                    pos.append(int(self.take("nat").text))
            self.take(text="]")
            self.take(text=";")
            entries.append((rule.text, tuple(pos)))
        self.take(text="}")
        return ("script", name, entries)


def parse(text: str, into: Document | None = None) -> Document:
    """Parse a .tgr source into a Document, inferring the signature."""
    items = _Parser(_tokenize(text)).parse_document()
    doc = into if into is not None else Document()
    sig = doc.signature

    for item in items:
        if item[0] in ("termgraph", "rule"):
            table = item[-1]
            for node, (symbol, successors, line, col) in table.items():
                try:
                    sig.declare(symbol, len(successors))
                except ArityMismatch as exc:
                    raise ArityMismatch(node, f"{line}:{col}: {exc}") from None

    names: dict[str, str] = {}
    for kind in ("graphs", "rules", "systems", "scripts"):
        for name in getattr(doc, kind):
            names[name] = kind
    rule_uses: list[tuple] = []
    for item in items:
        name_tok = item[1]
        name = name_tok.text
        if name in names:
            raise ParseError(f"name {name!r} already defined", name_tok.line, name_tok.col)
        if item[0] == "termgraph":
            _, _, root, table = item
            clean = {n: (v[0], v[1]) for n, v in table.items()}
            doc.graphs[name] = validate(clean, root, sig)
        elif item[0] == "rule":
            _, _, lhs, rhs, table = item
            clean = {n: (v[0], v[1]) for n, v in table.items()}
            doc.rules[name] = validate_rule(clean, lhs, rhs, name, sig)
        elif item[0] == "grs":
            rule_uses.append(item)
        else:
            _, _, entries = item
            doc.scripts[name] = Script(tuple(entries))
        names[name] = item[0]

    for _, name_tok, uses in rule_uses:
        rules = []
        for use in uses:
            if use.text not in doc.rules:
                raise ParseError(f"no rule named {use.text!r}", use.line, use.col)
            rules.append(doc.rules[use.text])
        doc.systems[name_tok.text] = Grs(sig, tuple(rules))
    return doc


def parse_files(paths) -> Document:
    doc = Document()
    for path in paths:
        with open(path, "r", encoding="utf-8") as handle:
            parse(handle.read(), into=doc)
    return doc


def _node_name(n) -> str:
    return f"n{n}"


def format_graph(g: TermGraph, name: str = "g", canonical: bool = True) -> str:
    """Render a graph as a termgraph item; canonical naming by default."""
    if canonical:
        g = canonicalize(g)
        naming = {n: _node_name(n) for n in g.nodes}
    else:
        naming = {n: str(n) for n in g.nodes}
    lines = [f"termgraph {name} {{", f"  root {naming[g.root]};"]
    for n in g.nodes:
        successors = g.suc(n)
        args = f"({', '.join(naming[s] for s in successors)})" if successors else ""
        lines.append(f"  {naming[n]}: {g.lab(n)}{args};")
    lines.append("}")
    return "\n".join(lines)


def format_graph_inline(g: TermGraph, name: str = "g") -> str:
    """One-line termgraph item, for embedding in reports."""
    g = canonicalize(g)
    parts = [f"root {_node_name(g.root)};"]
    for n in g.nodes:
        successors = g.suc(n)
        args = f"({', '.join(_node_name(s) for s in successors)})" if successors else ""
        parts.append(f"{_node_name(n)}: {g.lab(n)}{args};")
    return f"termgraph {name} {{ {' '.join(parts)} }}"


def format_rule(rule: Rule, name: str | None = None) -> str:
    lines = [f"rule {name or rule.name} {{", f"  lhs {rule.lhs_root};", f"  rhs {rule.rhs_root};"]
    for n in rule.lab:
        successors = rule.suc[n]
        args = f"({', '.join(str(s) for s in successors)})" if successors else ""
        lines.append(f"  {n}: {rule.lab[n]}{args};")
    lines.append("}")
    return "\n".join(lines)


def format_grs(grs: Grs, name: str) -> str:
    lines = [f"grs {name} {{"]
    for rule in grs.rules:
        lines.append(f"  use {rule.name};")
    lines.append("}")
    return "\n".join(lines)


def format_script(script: Script, name: str) -> str:
    lines = [f"script {name} {{"]
    for rule_name, pos in script.entries:
        lines.append(f"  step {rule_name} at [{', '.join(map(str, pos))}];")
    lines.append("}")
    return "\n".join(lines)


def format_document(doc: Document) -> str:
    parts = []
    for name, g in doc.graphs.items():
        parts.append(format_graph(g, name))
    for name, rule in doc.rules.items():
        parts.append(format_rule(rule, name))
    for name, grs in doc.systems.items():
        parts.append(format_grs(grs, name))
    for name, script in doc.scripts.items():
        parts.append(format_script(script, name))
    return "\n\n".join(parts) + "\n"
