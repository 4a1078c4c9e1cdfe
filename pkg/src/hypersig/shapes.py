"""A SHACL subset and the context evaluation function.

Supported on node shapes: ``sh:targetNode``, ``sh:targetClass``, ``sh:class``,
``sh:property``. Supported on property shapes: a single-predicate
``sh:path``, ``sh:minCount``, ``sh:maxCount``, ``sh:hasValue``, ``sh:class``,
``sh:node`` and ``sh:qualifiedValueShape`` with ``sh:qualifiedMinCount``.
Anything else in the SHACL namespace is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

from hypersig.rdf import IRI, BNode, Graph, Literal, Term
from hypersig.vocab import RDF_TYPE, SH

_IGNORED_SH = {SH.name, SH.description, SH.message, SH.order, SH.group}
_NODE_KEYS = {SH.targetNode, SH.targetClass, SH.term("class"), SH.property}
_PROPERTY_KEYS = {
    SH.path,
    SH.minCount,
    SH.maxCount,
    SH.hasValue,
    SH.term("class"),
    SH.node,
    SH.qualifiedValueShape,
    SH.qualifiedMinCount,
}


class ShapeError(ValueError):
    def __init__(self, kind: str, detail: str = ""):
        super().__init__(f"{kind}: {detail}" if detail else kind)
        self.kind = kind
        self.detail = detail


@dataclass(frozen=True)
class NodeTarget:
    node: Term


@dataclass(frozen=True)
class ClassTarget:
    cls: str


@dataclass(frozen=True)
class PropertyConstraint:
    path: str
    min_count: Optional[int] = None
    max_count: Optional[int] = None
    has_value: Optional[Term] = None
    value_class: Optional[str] = None
    qualified_shape: Optional["Shape"] = None
    qualified_min_count: Optional[int] = None
    node_shape: Optional["Shape"] = None

    def __post_init__(self):
        if (self.qualified_shape is None) != (self.qualified_min_count is None):
            raise ShapeError("InvalidShape", f"qualified constraint on {self.path} needs both shape and count")


@dataclass(frozen=True)
class Shape:
    id: Term
    targets: frozenset = frozenset()
    class_constraint: Optional[str] = None
    property_constraints: tuple = ()

    def __post_init__(self):
        if not (self.targets or self.class_constraint or self.property_constraints):
            raise ShapeError("EmptyShape", str(self.id))


@dataclass(frozen=True)
class ShapeResult:
    shape_id: Term
    focus: Term
    violations: tuple = ()

    @property
    def conforms(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class ConformanceReport:
    shape_id: Term
    results: tuple = field(default_factory=tuple)

    @property
    def conforms(self) -> bool:
        """All focus nodes conform and there is at least one of them."""
        return bool(self.results) and all(r.conforms for r in self.results)


# -- reading ------------------------------------------------------------------


def read_shapes(graph: Graph, roots: Iterable[Term]) -> list[Shape]:
    cache: dict[Term, Shape] = {}
    return [_read_shape(graph, root, cache, ()) for root in roots]


def read_shape(graph: Graph, root: Term) -> Shape:
    return _read_shape(graph, root, {}, ())


def _int_value(graph: Graph, node: Term, pred: str) -> Optional[int]:
    value = graph.value(node, IRI(pred))
    if value is None:
        return None
    if not isinstance(value, Literal) or not isinstance(value.to_python(), int) or isinstance(value.to_python(), bool):
        raise ShapeError("InvalidShape", f"{pred} on {node} must be an integer")
    result = value.to_python()
    if result < 0:
        raise ShapeError("InvalidShape", f"{pred} on {node} must be non-negative")
    return result


def _iri_value(graph: Graph, node: Term, pred: str) -> Optional[str]:
    value = graph.value(node, IRI(pred))
    if value is None:
        return None
    if not isinstance(value, IRI):
        raise ShapeError("InvalidShape", f"{pred} on {node} must be an IRI")
    return value.value


def _check_keys(graph: Graph, node: Term, allowed: set) -> None:
    for t in graph.match(node, None, None):
        pred = t.predicate.value
        if pred.startswith(str(SH)) and pred not in allowed and pred not in _IGNORED_SH:
            raise ShapeError("UnsupportedConstraint", pred)


def _read_shape(graph: Graph, node: Term, cache: dict, stack: tuple) -> Shape:
    if node in stack:
        raise ShapeError("CyclicShape", " -> ".join(str(n) for n in stack + (node,)))
    if node in cache:
        return cache[node]
    if not graph.has_subject(node):
        raise ShapeError("DanglingShape", str(node))
    _check_keys(graph, node, _NODE_KEYS)
    stack = stack + (node,)
    targets = set()
    for obj in graph.objects(node, IRI(SH.targetNode)):
        targets.add(NodeTarget(obj))
    for obj in graph.objects(node, IRI(SH.targetClass)):
        if not isinstance(obj, IRI):
            raise ShapeError("InvalidShape", "sh:targetClass must be an IRI")
        targets.add(ClassTarget(obj.value))
    props = []
    for pnode in graph.objects(node, IRI(SH.property)):
        props.append(_read_property(graph, pnode, cache, stack))
    shape = Shape(
        id=node,
        targets=frozenset(targets),
        class_constraint=_iri_value(graph, node, SH.term("class")),
        property_constraints=tuple(sorted(props, key=lambda p: (p.path, repr(p)))),
    )
    cache[node] = shape
    return shape


def _read_property(graph: Graph, pnode: Term, cache: dict, stack: tuple) -> PropertyConstraint:
    _check_keys(graph, pnode, _PROPERTY_KEYS)
    path = graph.value(pnode, IRI(SH.path))
    if path is None:
        raise ShapeError("InvalidShape", f"property shape {pnode} has no sh:path")
    if not isinstance(path, IRI):
        raise ShapeError("UnsupportedConstraint", "complex sh:path")
    node_ref = graph.value(pnode, IRI(SH.node))
    qualified_ref = graph.value(pnode, IRI(SH.qualifiedValueShape))
    return PropertyConstraint(
        path=path.value,
        min_count=_int_value(graph, pnode, SH.minCount),
        max_count=_int_value(graph, pnode, SH.maxCount),
        has_value=graph.value(pnode, IRI(SH.hasValue)),
        value_class=_iri_value(graph, pnode, SH.term("class")),
        qualified_shape=_read_shape(graph, qualified_ref, cache, stack) if qualified_ref is not None else None,
        qualified_min_count=_int_value(graph, pnode, SH.qualifiedMinCount),
        node_shape=_read_shape(graph, node_ref, cache, stack) if node_ref is not None else None,
    )


# -- validation -----------------------------------------------------------------


def _same_value(a: Term, b: Term) -> bool:
    if isinstance(a, Literal) and isinstance(b, Literal):
        return a.canonical() == b.canonical()
    return a == b


def _has_type(data: Graph, node: Term, cls: str) -> bool:
    if isinstance(node, Literal):
        return False
    return IRI(cls) in data.types(node)


def focus_nodes(shape: Shape, data: Graph) -> list[Term]:
    found = set()
    for target in shape.targets:
        if isinstance(target, NodeTarget):
            if data.mentions(target.node):
                found.add(target.node)
        else:
            found.update(data.subjects(IRI(RDF_TYPE), IRI(target.cls)))
    return sorted(found, key=lambda t: (type(t).__name__, str(t)))


def validate_node(shape: Shape, node: Term, data: Graph) -> list[tuple[str, str]]:
    """Violations of ``shape`` at ``node``, ignoring the shape's targets."""
    violations = []
    if shape.class_constraint is not None and not _has_type(data, node, shape.class_constraint):
        violations.append(("ClassMismatch", f"{node} is not a {shape.class_constraint}"))
    for prop in shape.property_constraints:
        values = [] if isinstance(node, Literal) else data.objects(node, IRI(prop.path))
        where = f"{node} {prop.path}"
        if prop.min_count is not None and len(values) < prop.min_count:
            violations.append(("MinCount", f"{where}: {len(values)} < {prop.min_count}"))
        if prop.max_count is not None and len(values) > prop.max_count:
            violations.append(("MaxCount", f"{where}: {len(values)} > {prop.max_count}"))
        if prop.has_value is not None and not any(_same_value(v, prop.has_value) for v in values):
            violations.append(("HasValueMismatch", f"{where}: missing {prop.has_value}"))
        if prop.value_class is not None:
            for v in values:
                if not _has_type(data, v, prop.value_class):
                    violations.append(("ClassMismatch", f"{where}: {v} is not a {prop.value_class}"))
        if prop.node_shape is not None:
            for v in values:
                if validate_node(prop.node_shape, v, data):
                    violations.append(("NodeShape", f"{where}: {v} does not conform to {prop.node_shape.id}"))
        if prop.qualified_shape is not None:
            matching = sum(1 for v in values if not validate_node(prop.qualified_shape, v, data))
            if matching < prop.qualified_min_count:
                violations.append(
                    ("QualifiedMinCount", f"{where}: {matching} conforming values < {prop.qualified_min_count}")
                )
    return violations


def conforms(shape: Shape, data: Graph) -> ConformanceReport:
    results = tuple(
        ShapeResult(shape.id, focus, tuple(validate_node(shape, focus, data))) for focus in focus_nodes(shape, data)
    )
    return ConformanceReport(shape.id, results)


def context_fraction(contexts: Iterable[Shape], artifact_situation: Graph, agent_situation: Graph) -> Fraction:
    """Exact share of context shapes the joint situation satisfies."""
    contexts = list(contexts)
    if not contexts:
        return Fraction(1)
    data = artifact_situation.union(agent_situation)
    passed = sum(1 for shape in contexts if conforms(shape, data).conforms)
    return Fraction(passed, len(contexts))


def evaluate_context(contexts: Iterable[Shape], artifact_situation: Graph, agent_situation: Graph) -> float:
    """Score in [0, 1]: fraction of context shapes fully satisfied by the union
    of the artifact and agent situations. No contexts scores 1.0."""
    return float(context_fraction(contexts, artifact_situation, agent_situation))


ShapeRef = Union[IRI, BNode]
