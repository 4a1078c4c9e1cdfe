from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import NamedTuple, Optional, Union

from hypersig.vocab import RDF_LANG_STRING, XSD_BOOLEAN, XSD_DECIMAL, XSD_INTEGER, XSD_STRING

_ABSOLUTE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_bnode_counter = itertools.count()


def is_absolute_iri(value: str) -> bool:
    return bool(_ABSOLUTE.match(value))


@dataclass(frozen=True, order=True)
class IRI:
    value: str

    def __str__(self) -> str:
        return self.value

    def n3(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True, order=True)
class BNode:
    label: str

    @classmethod
    def fresh(cls) -> "BNode":
        return cls(f"n{next(_bnode_counter)}")

    def __str__(self) -> str:
        return f"_:{self.label}"

    def n3(self) -> str:
        return f"_:{self.label}"


@dataclass(frozen=True, order=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    language: Optional[str] = None

    def __post_init__(self) -> None:
        if self.language is not None:
            if self.datatype == XSD_STRING:
                object.__setattr__(self, "datatype", RDF_LANG_STRING)
            elif self.datatype != RDF_LANG_STRING:
                raise ValueError("language tag requires rdf:langString datatype")
            object.__setattr__(self, "language", self.language.lower())
        elif self.datatype == RDF_LANG_STRING:
            raise ValueError("rdf:langString literal without language tag")

    @classmethod
    def of(cls, value: object) -> "Literal":
        """Build a typed literal from a Python value."""
        if isinstance(value, bool):
            return cls("true" if value else "false", XSD_BOOLEAN)
        if isinstance(value, int):
            return cls(str(value), XSD_INTEGER)
        if isinstance(value, (float, Decimal)):
            return cls(format(Decimal(str(value)), "f"), XSD_DECIMAL)
        return cls(str(value))

    def canonical(self) -> tuple:
        """Key for value comparison: numerics compare by value within their datatype."""
        if self.datatype == XSD_INTEGER:
            try:
                return (XSD_INTEGER, int(self.lexical))
            except ValueError:
                pass
        elif self.datatype == XSD_DECIMAL:
            try:
                return (XSD_DECIMAL, Decimal(self.lexical).normalize())
            except InvalidOperation:
                pass
        elif self.datatype == XSD_BOOLEAN and self.lexical in ("true", "false", "1", "0"):
            return (XSD_BOOLEAN, self.lexical in ("true", "1"))
        return (self.datatype, self.lexical, self.language)

    def to_python(self):
        key = self.canonical()
        if key[0] == XSD_INTEGER and isinstance(key[1], int):
            return key[1]
        if key[0] == XSD_DECIMAL and isinstance(key[1], Decimal):
            return key[1]
        if key[0] == XSD_BOOLEAN and isinstance(key[1], bool):
            return key[1]
        return self.lexical

    def __str__(self) -> str:
        return self.lexical


Term = Union[IRI, BNode, Literal]


class Triple(NamedTuple):
    subject: Union[IRI, BNode]
    predicate: IRI
    object: Term


def term_sort_key(term: Term) -> tuple:
    if isinstance(term, IRI):
        return (0, term.value)
    if isinstance(term, BNode):
        return (1, term.label)
    return (2, term.lexical, term.datatype, term.language or "")
