"""Namespace table for every vocabulary the environment reads or writes.

Documented in docs/vocabulary.md; keep the two in sync.
"""

from __future__ import annotations


class Namespace(str):
    """An IRI prefix; attribute access builds member IRIs."""

    def __getattr__(self, name: str) -> str:
        if name.startswith("__"):
            raise AttributeError(name)
        return self + name

    def term(self, name: str) -> str:
        return self + name


RDF = Namespace("http://www.w3.org/1999/02/22-rdf-syntax-ns#")
RDFS = Namespace("http://www.w3.org/2000/01/rdf-schema#")
XSD = Namespace("http://www.w3.org/2001/XMLSchema#")
SH = Namespace("http://www.w3.org/ns/shacl#")
HMAS = Namespace("https://purl.org/hmas/")
HINT = Namespace("https://purl.org/hmas/interaction#")
HCTL = Namespace("https://www.w3.org/2019/wot/hypermedia#")
HTV = Namespace("http://www.w3.org/2011/http#")
JS = Namespace("https://www.w3.org/2019/wot/json-schema#")
PDDL = Namespace("http://www.cs.yale.edu/homes/dvm/daml/pddlonto.daml#")
DRS = Namespace("http://www.cs.yale.edu/homes/dvm/daml/drsonto.daml#")
PRS = Namespace("https://example.org/prs#")
STRIPS = Namespace("https://example.org/strips#")
MANU = Namespace("https://example.org/manufacturing#")
EX = Namespace("http://ex.org/")
# terms this environment invents for its interaction log
ENV = Namespace("https://example.org/env#")

RDF_TYPE = RDF.type
RDF_NIL = RDF.nil
RDF_FIRST = RDF.first
RDF_REST = RDF.rest
RDF_LANG_STRING = RDF.langString
XSD_STRING = XSD.string
XSD_INTEGER = XSD.integer
XSD_DECIMAL = XSD.decimal
XSD_BOOLEAN = XSD.boolean

DEFAULT_PREFIXES: dict[str, str] = {
    "rdf": str(RDF),
    "rdfs": str(RDFS),
    "xsd": str(XSD),
    "sh": str(SH),
    "hmas": str(HMAS),
    "hint": str(HINT),
    "hctl": str(HCTL),
    "htv": str(HTV),
    "js": str(JS),
    "pddl": str(PDDL),
    "drs": str(DRS),
    "prs": str(PRS),
    "strips": str(STRIPS),
    "manu": str(MANU),
    "ex": str(EX),
    "env": str(ENV),
}
