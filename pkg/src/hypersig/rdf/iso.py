from __future__ import annotations

from collections import Counter, defaultdict

from hypersig.rdf.graph import Graph
from hypersig.rdf.terms import BNode, Triple


def _is_ground(t: Triple) -> bool:
    return not isinstance(t.subject, BNode) and not isinstance(t.object, BNode)


def _colors(triples, nodes) -> dict:
    """Iterated neighbourhood hashing; equal colors are necessary for a mapping."""
    color = {b: 0 for b in nodes}
    edges = defaultdict(list)
    for t in triples:
        if isinstance(t.subject, BNode):
            edges[t.subject].append(("out", t.predicate, t.object))
        if isinstance(t.object, BNode):
            edges[t.object].append(("in", t.predicate, t.subject))
    # same round count on both sides keeps colors comparable across graphs
    for _ in range(min(len(nodes), 12)):
        new = {}
        for b in nodes:
            sig = []
            for direction, pred, other in edges[b]:
                key = ("b", color[other]) if isinstance(other, BNode) else ("g", other)
                sig.append((direction, pred, key))
            new[b] = hash((color[b], tuple(sorted(sig, key=repr))))
        color = new
    return color


def isomorphic(g1: Graph, g2: Graph) -> bool:
    """True iff some blank-node bijection maps g1's triples onto g2's."""
    t1, t2 = g1.triples, g2.triples
    if len(t1) != len(t2):
        return False
    ground1 = {t for t in t1 if _is_ground(t)}
    ground2 = {t for t in t2 if _is_ground(t)}
    if ground1 != ground2:
        return False
    b1, b2 = g1.blank_nodes(), g2.blank_nodes()
    if len(b1) != len(b2):
        return False
    if not b1:
        return True
    c1, c2 = _colors(t1, b1), _colors(t2, b2)
    if Counter(c1.values()) != Counter(c2.values()):
        return False

    by_color = defaultdict(list)
    for b, c in c1.items():
        by_color[c].append(b)
    candidates = defaultdict(list)
    for b, c in c2.items():
        candidates[c].append(b)
    order = sorted(b1, key=lambda b: (len(by_color[c1[b]]), c1[b], b.label))

    involving = defaultdict(list)
    for t in t1:
        if isinstance(t.subject, BNode):
            involving[t.subject].append(t)
        if isinstance(t.object, BNode) and t.object != t.subject:
            involving[t.object].append(t)

    mapping: dict[BNode, BNode] = {}
    used: set[BNode] = set()

    def image(term):
        return mapping.get(term) if isinstance(term, BNode) else term

    def consistent(b) -> bool:
        for t in involving[b]:
            s, o = image(t.subject), image(t.object)
            if s is None or o is None:
                continue
            if Triple(s, t.predicate, o) not in t2:
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        b = order[i]
        for cand in candidates[c1[b]]:
            if cand in used:
                continue
            mapping[b] = cand
            used.add(cand)
            if consistent(b) and search(i + 1):
                return True
            del mapping[b]
            used.discard(cand)
        return False

    return search(0)
