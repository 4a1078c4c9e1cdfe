from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Iterator, Mapping, Optional

from hypersig.rdf.terms import BNode, IRI, Literal, Term, Triple, term_sort_key
from hypersig.vocab import RDF_FIRST, RDF_NIL, RDF_REST, RDF_TYPE


class MalformedList(ValueError):
    pass


class Graph:
    """An immutable set of triples with a prefix table.

    All "mutation" helpers return a new graph; instances are safe to share
    across threads.
    """

    __slots__ = ("_triples", "_prefixes", "_base", "_by_s", "_by_p", "_by_o")

    def __init__(
        self,
        triples: Iterable[Triple] = (),
        prefixes: Optional[Mapping[str, str]] = None,
        base: Optional[str] = None,
    ):
        frozen = frozenset(triples)
        for t in frozen:
            if not isinstance(t.predicate, IRI):
                raise TypeError(f"predicate must be an IRI: {t!r}")
            if isinstance(t.subject, Literal):
                raise TypeError(f"literal subject: {t!r}")
        prefixes = dict(prefixes or {})
        for name, ns in prefixes.items():
            if not ns:
                raise ValueError(f"prefix {name!r} maps to an empty namespace")
        self._triples = frozen
        self._prefixes = prefixes
        self._base = base
        self._by_s = None
        self._by_p = None
        self._by_o = None

    @property
    def triples(self) -> frozenset:
        return self._triples

    @property
    def prefixes(self) -> dict[str, str]:
        return dict(self._prefixes)

    @property
    def base(self) -> Optional[str]:
        return self._base

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __hash__(self) -> int:
        return hash(self._triples)

    def __repr__(self) -> str:
        return f"<Graph {len(self._triples)} triples>"

    def _index(self):
        if self._by_s is None:
            by_s, by_p, by_o = defaultdict(set), defaultdict(set), defaultdict(set)
            for t in self._triples:
                by_s[t.subject].add(t)
                by_p[t.predicate].add(t)
                by_o[t.object].add(t)
            self._by_s, self._by_p, self._by_o = by_s, by_p, by_o

    def match(self, s: Optional[Term] = None, p: Optional[Term] = None, o: Optional[Term] = None) -> set:
        """Triples matching the given components; ``None`` is a wildcard."""
        self._index()
        candidates = None
        for key, index in ((s, self._by_s), (p, self._by_p), (o, self._by_o)):
            if key is None:
                continue
            bucket = index.get(key, set())
            if candidates is None or len(bucket) < len(candidates):
                candidates = bucket
        if candidates is None:
            return set(self._triples)
        return {
            t
            for t in candidates
            if (s is None or t.subject == s) and (p is None or t.predicate == p) and (o is None or t.object == o)
        }

    def objects(self, s: Term, p: Term) -> list[Term]:
        return sorted((t.object for t in self.match(s, p, None)), key=_sort_key)

    def subjects(self, p: Term, o: Term) -> list[Term]:
        return sorted((t.subject for t in self.match(None, p, o)), key=_sort_key)

    def value(self, s: Term, p: Term) -> Optional[Term]:
        """The single object of (s, p), or None; more than one is an error."""
        found = self.objects(s, p)
        if len(found) > 1:
            raise ValueError(f"expected at most one value for {p} on {s}, found {len(found)}")
        return found[0] if found else None

    def types(self, node: Term) -> set[IRI]:
        return {o for o in (t.object for t in self.match(node, IRI(RDF_TYPE), None)) if isinstance(o, IRI)}

    def has_subject(self, node: Term) -> bool:
        self._index()
        return bool(self._by_s.get(node))

    def mentions(self, node: Term) -> bool:
        self._index()
        return bool(self._by_s.get(node) or self._by_o.get(node))

    def subject_nodes(self) -> set:
        self._index()
        return set(self._by_s)

    def incoming(self, node: Term) -> set:
        self._index()
        return set(self._by_o.get(node, ()))

    def union(self, *others: "Graph") -> "Graph":
        triples = set(self._triples)
        prefixes = dict(self._prefixes)
        for g in others:
            triples |= g._triples
            for k, v in g._prefixes.items():
                prefixes.setdefault(k, v)
        return Graph(triples, prefixes, self._base)

    def with_triples(self, add: Iterable[Triple] = (), remove: Iterable[Triple] = ()) -> "Graph":
        triples = (set(self._triples) - set(remove)) | set(add)
        return Graph(triples, self._prefixes, self._base)

    def with_prefixes(self, prefixes: Mapping[str, str]) -> "Graph":
        merged = dict(prefixes)
        merged.update(self._prefixes)
        return Graph(self._triples, merged, self._base)

    def blank_nodes(self) -> set[BNode]:
        found = set()
        for t in self._triples:
            if isinstance(t.subject, BNode):
                found.add(t.subject)
            if isinstance(t.object, BNode):
                found.add(t.object)
        return found


def _sort_key(term: Term) -> tuple:
    return term_sort_key(term)


def match(graph: Graph, s: Optional[Term] = None, p: Optional[Term] = None, o: Optional[Term] = None) -> set:
    return graph.match(s, p, o)


def read_list(graph: Graph, head: Term) -> list[Term]:
    """Walk an rdf:first/rdf:rest chain starting at ``head``."""
    items: list[Term] = []
    seen: set = set()
    node = head
    first, rest, nil = IRI(RDF_FIRST), IRI(RDF_REST), IRI(RDF_NIL)
    while node != nil:
        if node in seen:
            raise MalformedList(f"cyclic rdf:rest chain at {node}")
        seen.add(node)
        firsts = graph.objects(node, first)
        rests = graph.objects(node, rest)
        if len(firsts) != 1 or len(rests) != 1:
            raise MalformedList(f"list node {node} needs exactly one rdf:first and one rdf:rest")
        items.append(firsts[0])
        node = rests[0]
    return items


def build_list(items: Iterable[Term]) -> tuple[Term, list[Triple]]:
    """Encode ``items`` as an rdf:List; returns (head, triples)."""
    items = list(items)
    if not items:
        return IRI(RDF_NIL), []
    nodes = [BNode.fresh() for _ in items]
    triples = []
    for i, (node, item) in enumerate(zip(nodes, items)):
        triples.append(Triple(node, IRI(RDF_FIRST), item))
        nxt = nodes[i + 1] if i + 1 < len(nodes) else IRI(RDF_NIL)
        triples.append(Triple(node, IRI(RDF_REST), nxt))
    return nodes[0], triples
