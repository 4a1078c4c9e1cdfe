"""Minimal RDF data model: terms, immutable graphs, a Turtle subset."""

from hypersig.rdf.graph import Graph, MalformedList, build_list, match, read_list
from hypersig.rdf.iso import isomorphic
from hypersig.rdf.terms import BNode, IRI, Literal, Term, Triple, is_absolute_iri
from hypersig.rdf.turtle import TurtleSyntaxError, UnresolvedPrefix, parse_turtle, serialize_turtle

__all__ = [
    "BNode",
    "Graph",
    "IRI",
    "Literal",
    "MalformedList",
    "Term",
    "Triple",
    "TurtleSyntaxError",
    "UnresolvedPrefix",
    "build_list",
    "is_absolute_iri",
    "isomorphic",
    "match",
    "parse_turtle",
    "read_list",
    "serialize_turtle",
]
