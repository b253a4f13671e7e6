"""Textual DSL for metamodel extensions (``.cmx``) and instance models (``.cmi``).

Grammar::

    file           = metamodel_decl | model_decl ;
    metamodel_decl = "metamodel" STRING "extends" STRING "{" { concept_decl | rel_decl } "}" ;
    concept_decl   = "concept" IDENT "kind" KIND [ "phase" IDENT ] [ "specializes" IDENT ] [ "doc" STRING ] ;
    KIND           = "task" | "work-product" | "principle" | "phase" ;
    rel_decl       = "rel" IDENT ( "uses" | "follows" ) IDENT ;
    model_decl     = "model" STRING "conforms" STRING "{" { activity_decl | edge_decl } "}" ;
    activity_decl  = "activity" IDENT "instance-of" IDENT [ "note" STRING ] ;
    edge_decl      = "edge" IDENT ( "uses" | "follows" ) IDENT ;
    IDENT          = [A-Z][A-Za-z0-9]* ;

``#`` starts a comment that runs to the end of the line. Strings are double
quoted; inside them ``\\"`` and ``\\\\`` are the only escapes. ``A follows B``
reads in execution order: A happens before B.

Parsing never raises anything but :class:`ParseError`, whatever the input.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from typing import Union

from .core import Concept, ConceptKind, IDENT_RE, Relationship, RelationshipKind, humanize

PARSE_CODES = frozenset({
    "SYNTAX_ERROR",
    "DUPLICATE_DECL",
    "UNKNOWN_KEYWORD",
    "BAD_IDENTIFIER",
    "DANGLING_REFERENCE",
})

MAX_DIAGNOSTICS = 100

KEYWORDS = frozenset({
    "metamodel", "extends", "concept", "kind", "phase", "specializes", "doc", "rel",
    "uses", "follows", "model", "conforms", "activity", "instance-of", "note", "edge",
    "task", "work-product", "principle",
})
_EXTENSION_STMTS = ("concept", "rel")
_MODEL_STMTS = ("activity", "edge")
_STATEMENT_WORDS = frozenset(_EXTENSION_STMTS + _MODEL_STMTS)
_CONCEPT_CLAUSES = ("phase", "specializes", "doc")
_EDGE_VERBS = {"uses": RelationshipKind.USES, "follows": RelationshipKind.FOLLOWS}


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1


@dataclass(frozen=True)
class ParseDiagnostic:
    span: SourceSpan
    code: str
    message: str

    def __str__(self):
        return f"{self.span.line}:{self.span.column}: {self.code} {self.message}"


class ParseError(Exception):
    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else "no diagnostics"
        more = f" (+{len(self.diagnostics) - 1} more)" if len(self.diagnostics) > 1 else ""
        super().__init__(f"{first}{more}")


@dataclass(frozen=True)
class Activity:
    id: str
    instance_of: str
    note: str | None = None


@dataclass(frozen=True)
class Edge:
    kind: RelationshipKind
    source: str
    target: str

    def sort_key(self) -> tuple[str, str, str]:
        return (self.source, self.kind.value, self.target)

    def __str__(self):
        return f"{self.source} {self.kind.value} {self.target}"


@dataclass(frozen=True)
class InstanceModel:
    name: str
    conforms_to: str
    activities: dict[str, Activity] = field(default_factory=dict)
    edges: frozenset[Edge] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "activities", dict(self.activities))
        object.__setattr__(self, "edges", frozenset(self.edges))

    __hash__ = None  # type: ignore[assignment]

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges, key=Edge.sort_key)


@dataclass(frozen=True)
class MetamodelExtension:
    name: str
    base: str
    new_concepts: tuple[Concept, ...] = ()
    new_relationships: frozenset[Relationship] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "new_concepts", tuple(self.new_concepts))
        object.__setattr__(self, "new_relationships", frozenset(self.new_relationships))


# --- lexing -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n\f\v\ufeff]+)
  | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\]|\\.)*(?:"|\\?\Z))
  | (?P<word>[A-Za-z_][A-Za-z0-9_\-]*)
  | (?P<brace>[{}])
  | (?P<bad>.)
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass
class _Token:
    kind: str  # word | string | { | } | eof
    text: str
    offset: int
    value: str = ""


class _Source:
    def __init__(self, text: str):
        self.text = text
        self.line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def span(self, offset: int, length: int) -> SourceSpan:
        line = bisect.bisect_right(self.line_starts, offset) - 1
        return SourceSpan(line + 1, offset - self.line_starts[line] + 1, max(1, length))


class _TooMany(Exception):
    pass


class _Parser:
    def __init__(self, text: str):
        self.src = _Source(text)
        self.diagnostics: list[ParseDiagnostic] = []
        self.tokens = self._lex(text)
        self.pos = 0

    # diagnostics

    def report(self, code: str, message: str, offset: int, length: int = 1):
        self.diagnostics.append(ParseDiagnostic(self.src.span(offset, length), code, message))
        if len(self.diagnostics) >= MAX_DIAGNOSTICS:
            raise _TooMany

    def report_at(self, tok: _Token, code: str, message: str):
        self.report(code, message, tok.offset, len(tok.text) if tok.kind != "eof" else 1)

    # lexer

    def _lex(self, text: str) -> list[_Token]:
        tokens: list[_Token] = []
        try:
            for m in _TOKEN_RE.finditer(text):
                kind = m.lastgroup
                if kind in ("ws", "comment"):
                    continue
                raw = m.group()
                if kind == "bad":
                    self.report("SYNTAX_ERROR", f"unexpected character {raw!r}", m.start())
                    continue
                if kind == "string":
                    tokens.append(_Token("string", raw, m.start(), self._unescape(raw, m.start())))
                elif kind == "brace":
                    tokens.append(_Token(raw, raw, m.start()))
                else:
                    tokens.append(_Token("word", raw, m.start(), raw))
        except _TooMany:
            pass
        tokens.append(_Token("eof", "", len(text)))
        return tokens

    def _unescape(self, raw: str, offset: int) -> str:
        closed = len(raw) >= 2 and raw.endswith('"') and not _ends_with_escape(raw[1:-1])
        body = raw[1:-1] if closed else raw[1:]
        if not closed:
            self.report("SYNTAX_ERROR", "unterminated string", offset, len(raw))
        out = []
        i = 0
        while i < len(body):
            ch = body[i]
            if ch == "\\":
                nxt = body[i + 1] if i + 1 < len(body) else ""
                if nxt in ('"', "\\"):
                    out.append(nxt)
                else:
                    self.report("SYNTAX_ERROR", f"invalid escape \\{nxt}", offset + 1 + i, 2 if nxt else 1)
                    out.append(nxt)
                i += 2
            else:
                out.append(ch)
                i += 1
        return "".join(out)

    # token helpers

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_word(self, *words: str) -> bool:
        return self.tok.kind == "word" and self.tok.text in words

    def expect_word(self, word: str) -> _Token:
        tok = self.tok
        if tok.kind == "word" and tok.text == word:
            return self.advance()
        if tok.kind == "word" and tok.text[:1].islower() and tok.text not in KEYWORDS:
            self.report_at(tok, "UNKNOWN_KEYWORD", f"unknown keyword {tok.text!r}, expected {word!r}")
        else:
            self.report_at(tok, "SYNTAX_ERROR", f"expected {word!r}, found {_describe(tok)}")
        raise _Recover

    def expect_ident(self) -> _Token:
        tok = self.tok
        if tok.kind == "word":
            if IDENT_RE.match(tok.text):
                return self.advance()
            if tok.text in KEYWORDS:
                self.report_at(tok, "SYNTAX_ERROR", f"expected identifier, found keyword {tok.text!r}")
            else:
                self.report_at(tok, "BAD_IDENTIFIER", f"{tok.text!r} is not an UpperCamel identifier")
            self.advance()
        else:
            self.report_at(tok, "SYNTAX_ERROR", f"expected identifier, found {_describe(tok)}")
        raise _Recover

    def expect_string(self) -> _Token:
        tok = self.tok
        if tok.kind == "string":
            return self.advance()
        self.report_at(tok, "SYNTAX_ERROR", f"expected string, found {_describe(tok)}")
        raise _Recover

    def expect_choice(self, choices: dict, what: str):
        tok = self.tok
        if tok.kind == "word" and tok.text in choices:
            self.advance()
            return choices[tok.text]
        options = ", ".join(repr(c) for c in choices)
        if tok.kind == "word" and tok.text[:1].islower():
            self.report_at(tok, "UNKNOWN_KEYWORD", f"unknown {what} {tok.text!r}, expected one of {options}")
        else:
            self.report_at(tok, "SYNTAX_ERROR", f"expected {what} ({options}), found {_describe(tok)}")
        raise _Recover

    def synchronize(self):
        while self.tok.kind not in ("eof", "}") and not (
            self.tok.kind == "word" and self.tok.text in _STATEMENT_WORDS
        ):
            self.advance()

    # grammar

    def parse_file(self, expect: str | None):
        header = self.tok
        allowed = (expect,) if expect else ("metamodel", "model")
        if not (header.kind == "word" and header.text in allowed):
            wanted = " or ".join(repr(a) for a in allowed)
            if header.kind == "word" and header.text[:1].islower() and header.text not in KEYWORDS:
                self.report_at(header, "UNKNOWN_KEYWORD", f"unknown keyword {header.text!r}, expected {wanted}")
            else:
                self.report_at(header, "SYNTAX_ERROR", f"expected {wanted}, found {_describe(header)}")
            return None
        self.advance()
        is_model = header.text == "model"
        try:
            name = self.expect_string().value
            self.expect_word("conforms" if is_model else "extends")
            ref = self.expect_string().value
            self.expect_word_brace("{")
        except _Recover:
            return None
        if is_model:
            return self.model_body(name, ref)
        return self.extension_body(name, ref)

    def expect_word_brace(self, brace: str):
        if self.tok.kind == brace:
            self.advance()
            return
        self.report_at(self.tok, "SYNTAX_ERROR", f"expected {brace!r}, found {_describe(self.tok)}")
        raise _Recover

    def body(self, statements: tuple[str, ...], handlers, kind_name: str):
        while True:
            tok = self.tok
            if tok.kind == "}":
                self.advance()
                break
            if tok.kind == "eof":
                self.report_at(tok, "SYNTAX_ERROR", "missing '}' at end of input")
                return
            try:
                if tok.kind == "word" and tok.text in statements:
                    handlers[tok.text]()
                elif tok.kind == "word" and tok.text in _STATEMENT_WORDS:
                    self.report_at(tok, "SYNTAX_ERROR", f"{tok.text!r} is not allowed in {kind_name}")
                    self.advance()
                    raise _Recover
                elif tok.kind == "word" and tok.text[:1].islower() and tok.text not in KEYWORDS:
                    self.report_at(tok, "UNKNOWN_KEYWORD", f"unknown keyword {tok.text!r}")
                    self.advance()
                    raise _Recover
                else:
                    expected = " or ".join(repr(s) for s in statements)
                    self.report_at(tok, "SYNTAX_ERROR", f"expected {expected}, found {_describe(tok)}")
                    self.advance()
                    raise _Recover
            except _Recover:
                self.synchronize()
        if self.tok.kind != "eof":
            self.report_at(self.tok, "SYNTAX_ERROR", f"unexpected {_describe(self.tok)} after closing '}}'")

    def extension_body(self, name: str, base: str):
        concepts: list[Concept] = []
        concept_ids: set[str] = set()
        rels: dict[Relationship, None] = {}

        def concept():
            self.advance()
            ident = self.expect_ident()
            self.expect_word("kind")
            kind = self.expect_choice({k.value: k for k in ConceptKind}, "concept kind")
            values: dict[str, _Token] = {}
            last = -1
            while self.tok.kind == "word" and self.tok.text in _CONCEPT_CLAUSES:
                clause = self.tok
                idx = _CONCEPT_CLAUSES.index(clause.text)
                if idx <= last:
                    self.report_at(clause, "SYNTAX_ERROR",
                                   f"clause {clause.text!r} repeated or out of order (phase, specializes, doc)")
                    self.advance()
                    raise _Recover
                last = idx
                self.advance()
                values[clause.text] = self.expect_string() if clause.text == "doc" else self.expect_ident()
            if ident.text in concept_ids:
                self.report_at(ident, "DUPLICATE_DECL", f"concept {ident.text} is already declared")
                return
            concept_ids.add(ident.text)
            concepts.append(Concept(
                ident.text,
                humanize(ident.text),
                kind,
                values["doc"].value if "doc" in values else "",
                phase=values["phase"].text if "phase" in values else None,
                parent=values["specializes"].text if "specializes" in values else None,
            ))

        def rel():
            self.advance()
            src = self.expect_ident()
            kind = self.expect_choice(_EDGE_VERBS, "relationship kind")
            dst = self.expect_ident()
            r = Relationship(kind, src.text, dst.text)
            if r in rels:
                self.report_at(src, "DUPLICATE_DECL", f"relationship {r} is already declared")
                return
            rels[r] = None

        self.body(_EXTENSION_STMTS, {"concept": concept, "rel": rel}, "a metamodel extension")
        return MetamodelExtension(name, base, tuple(concepts), frozenset(rels))

    def model_body(self, name: str, conforms: str):
        activities: dict[str, Activity] = {}
        edges: dict[Edge, tuple[_Token, _Token]] = {}

        def activity():
            self.advance()
            ident = self.expect_ident()
            self.expect_word("instance-of")
            concept = self.expect_ident()
            note = None
            if self.at_word("note"):
                self.advance()
                note = self.expect_string().value
            if ident.text in activities:
                self.report_at(ident, "DUPLICATE_DECL", f"activity {ident.text} is already declared")
                return
            activities[ident.text] = Activity(ident.text, concept.text, note)

        def edge():
            start = self.advance()
            src = self.expect_ident()
            kind = self.expect_choice(_EDGE_VERBS, "edge kind")
            dst = self.expect_ident()
            e = Edge(kind, src.text, dst.text)
            if src.text == dst.text:
                self.report("SYNTAX_ERROR", "an edge cannot connect an activity to itself",
                            start.offset, dst.offset + len(dst.text) - start.offset)
                return
            if e in edges:
                self.report_at(src, "DUPLICATE_DECL", f"edge {e} is already declared")
                return
            edges[e] = (src, dst)

        self.body(_MODEL_STMTS, {"activity": activity, "edge": edge}, "an instance model")
        for e, (src, dst) in edges.items():
            for end in (src, dst):
                if end.text not in activities:
                    self.report_at(end, "DANGLING_REFERENCE", f"edge endpoint {end.text} is not a declared activity")
        return InstanceModel(name, conforms, activities, frozenset(edges))


class _Recover(Exception):
    pass


def _ends_with_escape(body: str) -> bool:
    backslashes = len(body) - len(body.rstrip("\\"))
    return backslashes % 2 == 1


def _describe(tok: _Token) -> str:
    if tok.kind == "eof":
        return "end of input"
    if tok.kind == "string":
        return "a string"
    return repr(tok.text)


def _decode(data: Union[str, bytes]) -> str:
    if isinstance(data, str):
        return data
    try:
        return bytes(data).decode("utf-8")
    except UnicodeDecodeError as exc:
        prefix = data[: exc.start]
        line = prefix.count(b"\n") + 1
        column = len(prefix[prefix.rfind(b"\n") + 1:].decode("utf-8")) + 1
        raise ParseError([ParseDiagnostic(
            SourceSpan(line, column, 1), "SYNTAX_ERROR", f"input is not valid UTF-8 (byte offset {exc.start})",
        )]) from None


def _run(data: Union[str, bytes], expect: str | None):
    parser = _Parser(_decode(data))
    result = None
    try:
        # lexical errors do not stop parsing; syntax errors after them are still worth reporting
        result = parser.parse_file(expect)
    except (_TooMany, _Recover):
        pass
    if parser.diagnostics:
        raise ParseError(parser.diagnostics)
    if result is None:
        raise ParseError([ParseDiagnostic(parser.src.span(parser.tok.offset, 1), "SYNTAX_ERROR", "could not parse input")])
    return result


def parse_extension(text: Union[str, bytes]) -> MetamodelExtension:
    """Parse a ``.cmx`` document; raises :class:`ParseError` with every diagnostic found."""
    return _run(text, "metamodel")


def parse_model(text: Union[str, bytes]) -> InstanceModel:
    """Parse a ``.cmi`` document; raises :class:`ParseError` with every diagnostic found."""
    return _run(text, "model")


def parse(text: Union[str, bytes]) -> Union[InstanceModel, MetamodelExtension]:
    """Parse either document type, chosen by its leading keyword."""
    return _run(text, None)


# --- serialization ----------------------------------------------------------

def quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _concept_line(c: Concept) -> str:
    parts = ["concept", c.id, "kind", c.kind.value]
    if c.phase is not None:
        parts += ["phase", c.phase]
    if c.parent is not None:
        parts += ["specializes", c.parent]
    if c.definition:
        parts += ["doc", quote(c.definition)]
    return " ".join(parts)


def serialize(x: Union[InstanceModel, MetamodelExtension]) -> str:
    """Canonical text form: declarations in order, edges/relationships sorted."""
    lines: list[str] = []
    if isinstance(x, InstanceModel):
        lines.append(f"model {quote(x.name)} conforms {quote(x.conforms_to)} {{")
        for a in x.activities.values():
            line = f"  activity {a.id} instance-of {a.instance_of}"
            if a.note is not None:
                line += f" note {quote(a.note)}"
            lines.append(line)
        lines.extend(f"  edge {e.source} {e.kind.value} {e.target}" for e in x.sorted_edges())
    elif isinstance(x, MetamodelExtension):
        lines.append(f"metamodel {quote(x.name)} extends {quote(x.base)} {{")
        lines.extend("  " + _concept_line(c) for c in x.new_concepts)
        lines.extend(
            f"  rel {r.source} {r.kind.value} {r.target}"
            for r in sorted(x.new_relationships, key=Relationship.sort_key)
        )
    else:
        raise TypeError(f"cannot serialize {type(x).__name__}")
    lines.append("}")
    return "\n".join(lines) + "\n"
