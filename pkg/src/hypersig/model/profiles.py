"""Reading and writing signifiers and resource profiles.

A signifier owns the subgraph reachable from its node: blank nodes are always
followed, named nodes only through structural predicates (the signified
action, its schemas, context shapes and PDDL parts). Everything else in an
artifact profile graph is the artifact's situation.
"""

from __future__ import annotations

import re
from collections import deque
from decimal import Decimal
from typing import Iterable, Optional

from hypersig.model.inputs import read_input_schema
from hypersig.model.types import (
    ActionSpecification,
    AgentProfile,
    ArtifactProfile,
    Atom,
    Form,
    ModelError,
    PddlActionSpec,
    PddlParameter,
    Signifier,
)
from hypersig.rdf import IRI, BNode, Graph, Literal, MalformedList, Term, Triple, read_list
from hypersig.shapes import ShapeError, read_shapes
from hypersig.vocab import DEFAULT_PREFIXES, DRS, HCTL, HINT, HMAS, HTV, JS, PDDL, RDF, RDF_TYPE, SH

_TYPE = IRI(RDF_TYPE)
_MEMBER = re.compile(r"^" + re.escape(str(RDF)) + r"_(\d+)$")

STRUCTURAL = frozenset(
    IRI(p)
    for p in (
        HINT.signifies,
        HINT.recommendsContext,
        HINT.recommendsAbility,
        HINT.hasSchema,
        HINT.hasForm,
        HINT.expects,
        JS.properties,
        SH.node,
        SH.qualifiedValueShape,
        SH.property,
        PDDL.parameters,
        PDDL.precondition,
        PDDL.effect,
        PDDL.conjunct,
        PDDL.formula,
        PDDL.args,
        RDF.first,
        RDF.rest,
    )
)


def _follows(pred: IRI) -> bool:
    return pred in STRUCTURAL or bool(_MEMBER.match(pred.value))


def closure(graph: Graph, node: Term) -> Graph:
    """Subgraph owned by ``node`` (see module docstring)."""
    seen = {node}
    queue = deque([node])
    triples = set()
    while queue:
        current = queue.popleft()
        for t in graph.match(current, None, None):
            triples.add(t)
            obj = t.object
            if obj in seen or isinstance(obj, Literal):
                continue
            if isinstance(obj, BNode) or _follows(t.predicate):
                seen.add(obj)
                queue.append(obj)
    return Graph(triples, graph.prefixes, graph.base)


def _require(graph: Graph, node: Term, what: str) -> None:
    if not graph.has_subject(node):
        raise ModelError("DanglingReference", f"{what} {node} has no triples")


def _single(graph: Graph, node: Term, pred: str) -> Optional[Term]:
    try:
        return graph.value(node, IRI(pred))
    except ValueError as exc:
        raise ModelError("InvalidValue", str(exc)) from None


# -- action specifications ---------------------------------------------------------


def read_form(graph: Graph, node: Term) -> Form:
    target = _single(graph, node, HCTL.hasTarget)
    if not isinstance(target, IRI):
        raise ModelError("InvalidForm", f"form {node} needs an IRI hctl:hasTarget")
    method = _single(graph, node, HTV.methodName)
    ctype = _single(graph, node, HCTL.forContentType)
    return Form(
        target=target.value,
        method=method.lexical if isinstance(method, Literal) else None,
        content_type=ctype.lexical if isinstance(ctype, Literal) else "application/json",
    )


def read_action_specification(graph: Graph, node: Term) -> ActionSpecification:
    _require(graph, node, "action specification")
    forms = tuple(sorted((read_form(graph, f) for f in graph.objects(node, IRI(HINT.hasForm))), key=repr))
    schema = None
    expects = _single(graph, node, HINT.expects)
    if expects is not None:
        schema_node = _single(graph, expects, HINT.hasSchema)
        schema = read_input_schema(graph, schema_node if schema_node is not None else expects)
    types = frozenset(t.value for t in graph.types(node))
    pddl = read_pddl_action(graph, node) if PDDL.Action in types else None
    return ActionSpecification(id=node, forms=forms, input=schema, pddl=pddl, types=types)


# -- PDDL -------------------------------------------------------------------------------


def _arg_value(term: Term):
    if isinstance(term, IRI):
        return term.value
    if isinstance(term, Literal):
        value = term.to_python()
        return float(value) if isinstance(value, Decimal) else value
    raise ModelError("InvalidPddl", f"blank node {term} as atom argument")


def _read_atom(graph: Graph, node: Term) -> Atom:
    pred = _single(graph, node, PDDL.predicate)
    if not isinstance(pred, Literal):
        raise ModelError("InvalidPddl", f"atomic formula {node} lacks pddl:predicate")
    args_head = _single(graph, node, PDDL.args)
    try:
        args = read_list(graph, args_head) if args_head is not None else []
    except MalformedList as exc:
        raise ModelError("InvalidPddl", str(exc)) from None
    return Atom(pred.lexical, tuple(_arg_value(a) for a in args))


def _read_formula(graph: Graph, node: Term, negated: bool = False) -> list[tuple[bool, Atom]]:
    """Flatten a conjunction of literals into (positive, atom) pairs."""
    types = {t.value for t in graph.types(node)}
    if PDDL.And in types:
        out = []
        for conjunct in graph.objects(node, IRI(PDDL.conjunct)):
            out.extend(_read_formula(graph, conjunct, negated))
        return out
    if PDDL.Not in types:
        if negated:
            raise ModelError("InvalidPddl", f"nested negation at {node}")
        inner = _single(graph, node, PDDL.formula)
        if inner is None:
            raise ModelError("InvalidPddl", f"negation {node} lacks pddl:formula")
        return _read_formula(graph, inner, True)
    if PDDL.Atomic_formula in types or graph.value(node, IRI(PDDL.predicate)) is not None:
        return [(not negated, _read_atom(graph, node))]
    raise ModelError("InvalidPddl", f"unsupported formula at {node}")


def _read_parameters(graph: Graph, node: Term) -> tuple:
    seq = _single(graph, node, PDDL.parameters)
    if seq is None:
        return ()
    members = []
    for t in graph.match(seq, None, None):
        m = _MEMBER.match(t.predicate.value)
        if m:
            members.append((int(m.group(1)), t.object))
    params = []
    for _, pnode in sorted(members, key=lambda m: m[0]):
        _require(graph, pnode, "parameter")
        name = _single(graph, pnode, PDDL.name)
        ptype = _single(graph, pnode, DRS.type)
        if not isinstance(name, Literal) or not isinstance(ptype, IRI):
            raise ModelError("InvalidPddl", f"parameter {pnode} needs pddl:name and drs:type")
        schema_node = _single(graph, pnode, HINT.hasSchema)
        prop = _single(graph, pnode, JS.propertyName)
        params.append(
            PddlParameter(
                name=name.lexical,
                type_iri=ptype.value,
                schema=read_input_schema(graph, schema_node) if schema_node is not None else None,
                property_name=prop.lexical if isinstance(prop, Literal) else None,
            )
        )
    names = [p.name for p in params]
    if len(names) != len(set(names)):
        raise ModelError("InvalidPddl", f"duplicate parameter names in {node}")
    return tuple(params)


def read_pddl_action(graph: Graph, node: Term) -> PddlActionSpec:
    label = _single(graph, node, PDDL.term("action-label"))
    if not isinstance(label, Literal):
        raise ModelError("InvalidPddl", f"action {node} lacks pddl:action-label")
    params = _read_parameters(graph, node)
    pre_node = _single(graph, node, PDDL.precondition)
    eff_node = _single(graph, node, PDDL.effect)
    pre = _read_formula(graph, pre_node) if pre_node is not None else []
    eff = _read_formula(graph, eff_node) if eff_node is not None else []
    declared = {p.name for p in params}
    for _, atom in pre + eff:
        for arg in atom.args:
            if isinstance(arg, str) and arg.startswith("?") and arg not in declared:
                raise ModelError("UnboundVariable", f"{arg} in {atom} of {label.lexical}")
    return PddlActionSpec(
        label=label.lexical,
        parameters=params,
        preconditions=frozenset(a for pos, a in pre if pos),
        negative_preconditions=frozenset(a for pos, a in pre if not pos),
        add_effects=frozenset(a for pos, a in eff if pos),
        del_effects=frozenset(a for pos, a in eff if not pos),
    )


# -- signifiers ---------------------------------------------------------------------


def _ability_types(graph: Graph, node: Term) -> set[str]:
    types = {t.value for t in graph.types(node)}
    if types:
        return types
    if isinstance(node, IRI):
        # a bare IRI names the ability type directly
        return {node.value}
    raise ModelError("DanglingReference", f"ability {node} has no type")


def read_signifier(graph: Graph, node: Term) -> Signifier:
    _require(graph, node, "signifier")
    spec_node = _single(graph, node, HINT.signifies)
    if spec_node is None:
        raise ModelError("MissingBehaviorSpec", str(node))
    abilities = set()
    for a in graph.objects(node, IRI(HINT.recommendsAbility)):
        abilities |= _ability_types(graph, a)
    contexts = graph.objects(node, IRI(HINT.recommendsContext))
    for c in contexts:
        _require(graph, c, "context")
    try:
        shapes = read_shapes(graph, contexts)
    except ShapeError:
        raise
    except ValueError as exc:
        raise ShapeError("InvalidShape", str(exc)) from None
    salience = _single(graph, node, HINT.hasSalience)
    if salience is not None:
        value = salience.to_python() if isinstance(salience, Literal) else None
        if isinstance(value, bool) or not isinstance(value, (int, Decimal)):
            raise ModelError("InvalidSalience", f"{node}: {salience}")
        salience = float(value)
    return Signifier(
        id=node,
        behavior_spec=read_action_specification(graph, spec_node),
        recommended_abilities=frozenset(abilities),
        recommended_contexts=frozenset(contexts),
        salience=salience,
        context_shapes=tuple(shapes),
        graph=closure(graph, node),
    )


# -- profiles ---------------------------------------------------------------------------


def _profile_node(graph: Graph, type_iri: str) -> Term:
    nodes = graph.subjects(_TYPE, IRI(type_iri))
    if not nodes:
        raise ModelError("NoProfileNode", type_iri)
    if len(nodes) > 1:
        raise ModelError("MultipleProfileNodes", ", ".join(map(str, nodes)))
    return nodes[0]


def _subject_of(graph: Graph, profile: Term) -> IRI:
    subject = _single(graph, profile, HMAS.isProfileOf)
    if not isinstance(subject, IRI):
        raise ModelError("InvalidProfile", f"{profile} needs an IRI hmas:isProfileOf")
    return subject


def _profile_triples(graph: Graph, profile: Term) -> set:
    return {t for t in graph.match(profile, None, None)}


def _workspace(graph: Graph, subject: IRI) -> Optional[str]:
    ws = _single(graph, subject, HMAS.isContainedIn)
    return ws.value if isinstance(ws, IRI) else None


def read_artifact_profile(graph: Graph) -> ArtifactProfile:
    profile = _profile_node(graph, HMAS.ArtifactProfile)
    artifact = _subject_of(graph, profile)
    signifiers = [read_signifier(graph, n) for n in graph.subjects(_TYPE, IRI(HMAS.Signifier))]
    owned = set().union(*(s.graph.triples for s in signifiers)) if signifiers else set()
    drop = owned | _profile_triples(graph, profile) | graph.match(artifact, IRI(HMAS.isContainedIn), None)
    return ArtifactProfile(
        iri=str(profile),
        artifact_iri=artifact.value,
        signifiers=tuple(sorted(signifiers, key=lambda s: str(s.id))),
        situation=Graph(graph.triples - drop, graph.prefixes, graph.base),
        workspace_iri=_workspace(graph, artifact),
    )


def _profile_header(profile_iri: str, kind: str, subject: str, workspace: Optional[str]) -> list[Triple]:
    node = IRI(profile_iri)
    triples = [Triple(node, _TYPE, IRI(kind)), Triple(node, IRI(HMAS.isProfileOf), IRI(subject))]
    if workspace:
        triples.append(Triple(IRI(subject), IRI(HMAS.isContainedIn), IRI(workspace)))
    return triples


def write_artifact_profile(profile: ArtifactProfile) -> Graph:
    triples = set(_profile_header(profile.iri, HMAS.ArtifactProfile, profile.artifact_iri, profile.workspace_iri))
    triples |= profile.situation.triples
    prefixes = dict(DEFAULT_PREFIXES)
    for sig in profile.signifiers:
        triples |= sig.graph.triples
        prefixes.update(sig.graph.prefixes)
    prefixes.update(profile.situation.prefixes)
    return Graph(triples, prefixes)


def read_agent_profile(graph: Graph) -> AgentProfile:
    profile = _profile_node(graph, HMAS.AgentProfile)
    agent = _subject_of(graph, profile)
    abilities = set()
    drop = _profile_triples(graph, profile) | graph.match(agent, IRI(HMAS.isContainedIn), None)
    for t in graph.match(agent, IRI(HINT.hasAbility), None):
        abilities |= _ability_types(graph, t.object)
        drop.add(t)
        if isinstance(t.object, BNode):
            drop |= closure(graph, t.object).triples
    return AgentProfile(
        iri=str(profile),
        agent_iri=agent.value,
        abilities=frozenset(abilities),
        situation=Graph(graph.triples - drop, graph.prefixes, graph.base),
        workspace_iri=_workspace(graph, agent),
    )


def write_agent_profile(profile: AgentProfile) -> Graph:
    triples = set(_profile_header(profile.iri, HMAS.AgentProfile, profile.agent_iri, profile.workspace_iri))
    agent = IRI(profile.agent_iri)
    for ability in sorted(profile.abilities):
        node = BNode.fresh()
        triples.add(Triple(agent, IRI(HINT.hasAbility), node))
        triples.add(Triple(node, _TYPE, IRI(ability)))
    triples |= profile.situation.triples
    prefixes = dict(DEFAULT_PREFIXES)
    prefixes.update(profile.situation.prefixes)
    return Graph(triples, prefixes)


def signifier_ids(profile: ArtifactProfile) -> set[str]:
    return {str(s.id) for s in profile.signifiers}


def signifiers_of(graph: Graph) -> Iterable[Signifier]:
    return (read_signifier(graph, n) for n in graph.subjects(_TYPE, IRI(HMAS.Signifier)))
