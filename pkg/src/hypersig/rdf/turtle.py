"""Parser and serializer for the Turtle subset used by profiles and fixtures.

Supported: ``@prefix``/``@base`` (and the SPARQL-style ``PREFIX``/``BASE``),
prefixed names, relative and absolute IRIs, ``a``, ``;`` and ``,`` lists,
blank node labels and property lists, collections, plain/language-tagged/typed
strings, integers, decimals and booleans. Numeric exponents and triple-quoted
strings are rejected.
"""

from __future__ import annotations

import re
from typing import Optional
from urllib.parse import urljoin

from hypersig.rdf.graph import Graph
from hypersig.rdf.terms import BNode, IRI, Literal, Term, Triple, is_absolute_iri, term_sort_key
from hypersig.vocab import (
    RDF_FIRST,
    RDF_LANG_STRING,
    RDF_NIL,
    RDF_REST,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_INTEGER,
    XSD_STRING,
)


class TurtleSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class UnresolvedPrefix(TurtleSyntaxError):
    def __init__(self, name: str, line: int = 0, column: int = 0):
        super().__init__(f"undeclared prefix {name!r}", line, column)
        self.name = name


_PN_CHARS_BASE = re.compile(r"[A-Za-zÀ-￿]")
_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_IRI_FORBIDDEN = set(' <>"{}|^`\\\n\r\t')
_DELIMS = set(" \t\r\n#;,.)]([<\"'")


def _is_pn_char(ch: str) -> bool:
    return bool(ch) and (ch.isalnum() or ch in "_-" or ch == "·" or ord(ch) > 0x7F)


class _Parser:
    def __init__(self, text: str, base: Optional[str]):
        self.text = text
        self.pos = 0
        self.base = base
        self.prefixes: dict[str, str] = {}
        self.triples: set[Triple] = set()
        self.bnodes: dict[str, BNode] = {}

    # -- cursor helpers -------------------------------------------------
    def error(self, message: str, pos: Optional[int] = None) -> TurtleSyntaxError:
        line, col = self.location(self.pos if pos is None else pos)
        return TurtleSyntaxError(message, line, col)

    def location(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def skip_ws(self) -> None:
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\r\n":
                self.pos += 1
            elif ch == "#":
                end = text.find("\n", self.pos)
                self.pos = len(text) if end < 0 else end + 1
            else:
                break

    def expect(self, ch: str) -> None:
        self.skip_ws()
        if self.peek() != ch:
            found = self.peek() or "end of input"
            raise self.error(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def keyword_ahead(self, word: str, case_insensitive: bool = False) -> bool:
        chunk = self.text[self.pos : self.pos + len(word)]
        if case_insensitive:
            chunk = chunk.upper()
        if chunk != word:
            return False
        nxt = self.peek(len(word))
        return nxt == "" or nxt in _DELIMS

    # -- grammar --------------------------------------------------------
    def parse(self) -> Graph:
        while True:
            self.skip_ws()
            if self.at_end():
                break
            self.statement()
        return Graph(self.triples, self.prefixes, self.base)

    def statement(self) -> None:
        if self.peek() == "@":
            self.directive()
            return
        if self.keyword_ahead("PREFIX", True) or self.keyword_ahead("BASE", True):
            self.sparql_directive()
            return
        self.triples_block()
        self.expect(".")

    def directive(self) -> None:
        start = self.pos
        if self.text.startswith("@prefix", self.pos):
            self.pos += len("@prefix")
            self.prefix_decl()
        elif self.text.startswith("@base", self.pos):
            self.pos += len("@base")
            self.base_decl()
        else:
            raise self.error("unknown directive", start)
        self.expect(".")

    def sparql_directive(self) -> None:
        if self.text[self.pos : self.pos + 6].upper() == "PREFIX":
            self.pos += 6
            self.prefix_decl()
        else:
            self.pos += 4
            self.base_decl()

    def prefix_decl(self) -> None:
        self.skip_ws()
        start = self.pos
        while _is_pn_char(self.peek()) or self.peek() == ".":
            self.pos += 1
        name = self.text[start : self.pos]
        if name.endswith(".") or (name and not _PN_CHARS_BASE.match(name[0])):
            raise self.error(f"invalid prefix name {name!r}", start)
        if self.peek() != ":":
            raise self.error("expected ':' after prefix name")
        self.pos += 1
        self.skip_ws()
        if self.peek() != "<":
            raise self.error("expected IRI in prefix declaration")
        iri = self.iriref()
        self.prefixes[name] = iri

    def base_decl(self) -> None:
        self.skip_ws()
        if self.peek() != "<":
            raise self.error("expected IRI in base declaration")
        self.base = self.iriref()

    def triples_block(self) -> None:
        self.skip_ws()
        if self.peek() == "[":
            subject = self.blank_node_property_list()
            self.skip_ws()
            if self.peek() != ".":
                self.predicate_object_list(subject)
            return
        subject = self.subject()
        self.predicate_object_list(subject)

    def subject(self) -> Term:
        ch = self.peek()
        if ch == "(":
            return self.collection()
        if ch == "_" and self.peek(1) == ":":
            return self.blank_label()
        term = self.iri_or_pname()
        if term is None:
            raise self.error(f"expected subject, found {ch or 'end of input'!r}")
        return term

    def predicate_object_list(self, subject: Term) -> None:
        self.verb_object_list(subject)
        while True:
            self.skip_ws()
            if self.peek() != ";":
                return
            while self.peek() == ";":
                self.pos += 1
                self.skip_ws()
            if self.peek() in (".", "]", ""):
                return
            self.verb_object_list(subject)

    def verb_object_list(self, subject: Term) -> None:
        self.skip_ws()
        if self.peek() == "a" and self.keyword_ahead("a"):
            self.pos += 1
            predicate = IRI(RDF_TYPE)
        else:
            start = self.pos
            predicate = self.iri_or_pname()
            if not isinstance(predicate, IRI):
                raise self.error("expected predicate", start)
        self.object_list(subject, predicate)

    def object_list(self, subject: Term, predicate: IRI) -> None:
        while True:
            obj = self.object()
            self.triples.add(Triple(subject, predicate, obj))
            self.skip_ws()
            if self.peek() != ",":
                return
            self.pos += 1

    def object(self) -> Term:
        self.skip_ws()
        ch = self.peek()
        if ch == "":
            raise self.error("unexpected end of input, expected object")
        if ch == "[":
            return self.blank_node_property_list()
        if ch == "(":
            return self.collection()
        if ch == "_" and self.peek(1) == ":":
            return self.blank_label()
        if ch in "\"'":
            return self.string_literal()
        if ch.isdigit() or (ch in "+-." and (self.peek(1).isdigit() or self.peek(1) == ".")):
            return self.numeric_literal()
        if self.keyword_ahead("true"):
            self.pos += 4
            return Literal("true", XSD_BOOLEAN)
        if self.keyword_ahead("false"):
            self.pos += 5
            return Literal("false", XSD_BOOLEAN)
        term = self.iri_or_pname()
        if term is None:
            raise self.error(f"unexpected character {ch!r}")
        return term

    def blank_node_property_list(self) -> BNode:
        self.expect("[")
        node = BNode.fresh()
        self.skip_ws()
        if self.peek() == "]":
            self.pos += 1
            return node
        self.predicate_object_list(node)
        self.expect("]")
        return node

    def collection(self) -> Term:
        self.expect("(")
        items = []
        while True:
            self.skip_ws()
            if self.peek() == ")":
                self.pos += 1
                break
            if self.at_end():
                raise self.error("unterminated collection")
            items.append(self.object())
        if not items:
            return IRI(RDF_NIL)
        nodes = [BNode.fresh() for _ in items]
        for i, node in enumerate(nodes):
            self.triples.add(Triple(node, IRI(RDF_FIRST), items[i]))
            rest = nodes[i + 1] if i + 1 < len(nodes) else IRI(RDF_NIL)
            self.triples.add(Triple(node, IRI(RDF_REST), rest))
        return nodes[0]

    def blank_label(self) -> BNode:
        start = self.pos
        self.pos += 2
        label_start = self.pos
        while _is_pn_char(self.peek()) or (self.peek() == "." and _is_pn_char(self.peek(1))):
            self.pos += 1
        label = self.text[label_start : self.pos]
        if not label:
            raise self.error("empty blank node label", start)
        if label not in self.bnodes:
            self.bnodes[label] = BNode.fresh()
        return self.bnodes[label]

    def iri_or_pname(self) -> Optional[IRI]:
        ch = self.peek()
        if ch == "<":
            return IRI(self.iriref())
        if ch == ":" or _PN_CHARS_BASE.match(ch or " "):
            return self.pname()
        return None

    def iriref(self) -> str:
        start = self.pos
        self.pos += 1
        chars = []
        while True:
            ch = self.peek()
            if ch == "":
                raise self.error("unterminated IRI", start)
            if ch == ">":
                self.pos += 1
                break
            if ch == "\\":
                chars.append(self.unicode_escape())
                continue
            if ch in _IRI_FORBIDDEN:
                raise self.error(f"illegal character {ch!r} in IRI")
            chars.append(ch)
            self.pos += 1
        raw = "".join(chars)
        return self.resolve(raw, start)

    def resolve(self, raw: str, pos: int) -> str:
        if is_absolute_iri(raw):
            return raw
        if self.base is None:
            raise self.error(f"relative IRI <{raw}> without a base", pos)
        return urljoin(self.base, raw)

    def pname(self) -> IRI:
        start = self.pos
        while _is_pn_char(self.peek()) or (self.peek() == "." and _is_pn_char(self.peek(1))):
            self.pos += 1
        prefix = self.text[start : self.pos]
        if self.peek() != ":":
            raise self.error(f"unexpected token {prefix!r}", start)
        self.pos += 1
        local_start = self.pos
        while True:
            ch = self.peek()
            if _is_pn_char(ch) or ch == ":":
                self.pos += 1
            elif ch == "." and (_is_pn_char(self.peek(1)) or self.peek(1) == ":"):
                self.pos += 1
            elif ch == "%" and all(c in "0123456789abcdefABCDEF" for c in self.text[self.pos + 1 : self.pos + 3]) and len(self.text[self.pos + 1 : self.pos + 3]) == 2:
                self.pos += 3
            else:
                break
        local = self.text[local_start : self.pos]
        if prefix not in self.prefixes:
            line, col = self.location(start)
            raise UnresolvedPrefix(prefix, line, col)
        return IRI(self.prefixes[prefix] + local)

    def unicode_escape(self) -> str:
        start = self.pos
        kind = self.peek(1)
        width = {"u": 4, "U": 8}.get(kind)
        if width is None:
            raise self.error("invalid escape in IRI", start)
        digits = self.text[self.pos + 2 : self.pos + 2 + width]
        if len(digits) != width or any(c not in "0123456789abcdefABCDEF" for c in digits):
            raise self.error("malformed unicode escape", start)
        self.pos += 2 + width
        return chr(int(digits, 16))

    def string_literal(self) -> Literal:
        start = self.pos
        quote = self.peek()
        if self.text.startswith(quote * 3, self.pos):
            raise self.error("triple-quoted strings are not supported", start)
        self.pos += 1
        chars = []
        while True:
            ch = self.peek()
            if ch == "":
                raise self.error("unterminated string", start)
            if ch in "\n\r":
                raise self.error("newline in string literal")
            if ch == quote:
                self.pos += 1
                break
            if ch == "\\":
                nxt = self.peek(1)
                if nxt in _ESCAPES:
                    chars.append(_ESCAPES[nxt])
                    self.pos += 2
                elif nxt in ("u", "U"):
                    chars.append(self.unicode_escape())
                else:
                    raise self.error(f"invalid escape \\{nxt}")
                continue
            chars.append(ch)
            self.pos += 1
        lexical = "".join(chars)
        if self.peek() == "@":
            self.pos += 1
            tag_start = self.pos
            while self.peek().isalnum() or self.peek() == "-":
                self.pos += 1
            tag = self.text[tag_start : self.pos]
            if not re.fullmatch(r"[A-Za-z]+(-[A-Za-z0-9]+)*", tag):
                raise self.error(f"invalid language tag {tag!r}", tag_start)
            return Literal(lexical, RDF_LANG_STRING, tag)
        if self.text.startswith("^^", self.pos):
            self.pos += 2
            dt_pos = self.pos
            datatype = self.iri_or_pname()
            if datatype is None:
                raise self.error("expected datatype IRI after '^^'", dt_pos)
            if datatype.value == RDF_LANG_STRING:
                raise self.error("rdf:langString requires a language tag", dt_pos)
            return Literal(lexical, datatype.value)
        return Literal(lexical, XSD_STRING)

    def numeric_literal(self) -> Literal:
        m = re.compile(r"[+-]?(\d+(\.\d+)?|\.\d+)").match(self.text, self.pos)
        if not m:
            raise self.error("malformed number")
        end = m.end()
        if end < len(self.text) and self.text[end] in "eE":
            raise self.error("numeric exponents are not supported")
        self.pos = end
        lexical = m.group(0)
        datatype = XSD_DECIMAL if "." in lexical else XSD_INTEGER
        return Literal(lexical, datatype)


def parse_turtle(text: str, base: Optional[str] = None) -> Graph:
    """Parse a Turtle-subset document into a :class:`Graph`.

    Raises :class:`TurtleSyntaxError` (or its subclass :class:`UnresolvedPrefix`)
    on malformed input or constructs outside the subset.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TurtleSyntaxError(f"input is not UTF-8: {exc}") from exc
    if base is not None and not is_absolute_iri(base):
        raise TurtleSyntaxError(f"base IRI {base!r} is not absolute")
    return _Parser(text, base).parse()


# -- serialization ----------------------------------------------------------

_LOCAL_NAME = re.compile(r"^([A-Za-z0-9_]([A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)?$")
_INTEGER = re.compile(r"^[+-]?\d+$")
_DECIMAL = re.compile(r"^[+-]?\d*\.\d+$")


def _escape(value: str) -> str:
    out = []
    for ch in value:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


class _Writer:
    def __init__(self, graph: Graph):
        self.graph = graph
        self.prefixes = dict(sorted(graph.prefixes.items()))
        self.used_prefixes: set[str] = set()
        self.labels: dict[BNode, str] = {}
        self.inline: set[BNode] = set()
        self.lists: dict[BNode, list[Term]] = {}
        self.emitted: set = set()

    def qname(self, iri: str) -> Optional[str]:
        best = None
        for name, ns in self.prefixes.items():
            if iri.startswith(ns) and _LOCAL_NAME.match(iri[len(ns) :]):
                if best is None or len(ns) > len(self.prefixes[best]):
                    best = name
        if best is None:
            return None
        self.used_prefixes.add(best)
        return f"{best}:{iri[len(self.prefixes[best]):]}"

    def iri(self, iri: str) -> str:
        return self.qname(iri) or f"<{_escape_iri(iri)}>"

    def literal(self, lit: Literal) -> str:
        if lit.datatype == XSD_INTEGER and _INTEGER.match(lit.lexical):
            return lit.lexical
        if lit.datatype == XSD_DECIMAL and _DECIMAL.match(lit.lexical):
            return lit.lexical
        if lit.datatype == XSD_BOOLEAN and lit.lexical in ("true", "false"):
            return lit.lexical
        quoted = f'"{_escape(lit.lexical)}"'
        if lit.language is not None:
            return f"{quoted}@{lit.language}"
        if lit.datatype == XSD_STRING:
            return quoted
        return f"{quoted}^^{self.iri(lit.datatype)}"

    def label(self, node: BNode) -> str:
        if node not in self.labels:
            self.labels[node] = f"b{len(self.labels)}"
        return f"_:{self.labels[node]}"

    def plan_blank_nodes(self) -> None:
        g = self.graph
        rest, first, nil = IRI(RDF_REST), IRI(RDF_FIRST), IRI(RDF_NIL)
        for node in g.blank_nodes():
            refs = g.incoming(node)
            if len(refs) == 1:
                self.inline.add(node)
        for node in list(self.inline):
            # a list head is referenced once by a non-rdf:rest edge
            (ref,) = g.incoming(node)
            if ref.predicate == rest:
                continue
            items, cur, chain = [], node, []
            ok = True
            while cur != nil:
                if not isinstance(cur, BNode) or cur not in self.inline or cur in chain:
                    ok = False
                    break
                outgoing = g.match(cur, None, None)
                preds = sorted(t.predicate.value for t in outgoing)
                if preds != sorted([RDF_FIRST, RDF_REST]):
                    ok = False
                    break
                chain.append(cur)
                items.append(g.value(cur, first))
                cur = g.value(cur, rest)
            if ok and chain:
                self.lists[node] = items
                for member in chain[1:]:
                    self.emitted.add(member)

    def term(self, term: Term, indent: int) -> str:
        if isinstance(term, IRI):
            return "()" if term.value == RDF_NIL else self.iri(term.value)
        if isinstance(term, Literal):
            return self.literal(term)
        if term in self.inline and term not in self.emitted:
            self.emitted.add(term)
            if term in self.lists:
                inner = " ".join(self.term(item, indent) for item in self.lists[term])
                return f"( {inner} )" if inner else "()"
            body = self.predicate_lines(term, indent + 1)
            if not body:
                return "[]"
            pad = "    " * indent
            return "[\n" + body + "\n" + pad + "]"
        return self.label(term)

    def predicate_lines(self, subject: Term, indent: int) -> str:
        g = self.graph
        pad = "    " * indent
        by_pred: dict[IRI, list[Term]] = {}
        for t in g.match(subject, None, None):
            by_pred.setdefault(t.predicate, []).append(t.object)
        rdf_type = IRI(RDF_TYPE)
        order = sorted(by_pred, key=lambda p: (p != rdf_type, p.value))
        lines = []
        for pred in order:
            verb = "a" if pred == rdf_type else self.iri(pred.value)
            objs = sorted(by_pred[pred], key=term_sort_key)
            rendered = ", ".join(self.term(o, indent) for o in objs)
            lines.append(f"{pad}{verb} {rendered}")
        return " ;\n".join(lines)

    def write(self) -> str:
        g = self.graph
        self.plan_blank_nodes()
        subjects = sorted(g.subject_nodes(), key=term_sort_key)
        blocks = []
        for subject in subjects:
            if subject in self.inline:
                continue
            blocks.append(self.subject_block(subject))
        # inline candidates never reached from a root sit on a cycle; break it
        while True:
            pending = [s for s in subjects if s in self.inline and s not in self.emitted]
            if not pending:
                break
            node = pending[0]
            self.inline.discard(node)
            self.lists.pop(node, None)
            blocks.append(self.subject_block(node))
        header = [f"@prefix {name}: <{_escape_iri(ns)}> ." for name, ns in self.prefixes.items() if name in self.used_prefixes]
        out = "\n".join(header)
        if header and blocks:
            out += "\n\n"
        out += "\n\n".join(blocks)
        return out + ("\n" if out else "")

    def subject_block(self, subject: Term) -> str:
        self.emitted.add(subject)
        head = self.iri(subject.value) if isinstance(subject, IRI) else self.label(subject)
        body = self.predicate_lines(subject, 1)
        return f"{head}\n{body} ."


def _escape_iri(iri: str) -> str:
    return "".join(f"\\u{ord(c):04X}" if c in _IRI_FORBIDDEN else c for c in iri)


def serialize_turtle(graph: Graph) -> str:
    """Render ``graph`` as Turtle; blank node labels are regenerated."""
    return _Writer(graph).write()
