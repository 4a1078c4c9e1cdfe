"""STRIPS planning over actions read from signified PDDL annotations."""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from hypersig.model import Atom, Form, ObjectSchema, PddlActionSpec, Signifier, single_value, validate_input
from hypersig.rdf import IRI, Graph, Literal
from hypersig.vocab import MANU, RDF_TYPE

log = logging.getLogger(__name__)

DEFAULT_STATE_BOUND = 100_000

State = frozenset  # of ground Atom


class DomainError(Exception):
    def __init__(self, kind: str, detail: str = ""):
        super().__init__(f"{kind}: {detail}" if detail else kind)
        self.kind = kind


class NoPlan(Exception):
    def __init__(self, explored: int, bound: int):
        super().__init__(f"goal unreachable ({explored} states explored, bound {bound})")
        self.explored = explored
        self.bound = bound


@dataclass(frozen=True)
class ActionSchema:
    spec: PddlActionSpec
    form: Form
    input_schema: Optional[ObjectSchema] = None

    @property
    def label(self) -> str:
        return self.spec.label


@dataclass(frozen=True, order=True)
class GroundAction:
    label: str
    args: tuple
    preconditions: frozenset = field(compare=False)
    negative_preconditions: frozenset = field(compare=False)
    add_effects: frozenset = field(compare=False)
    del_effects: frozenset = field(compare=False)
    form: Optional[Form] = field(default=None, compare=False)
    payload: Optional[dict] = field(default=None, compare=False)

    def applicable(self, state: State) -> bool:
        return self.preconditions <= state and not (self.negative_preconditions & state)

    def apply(self, state: State) -> State:
        return (state - self.del_effects) | self.add_effects

    def __str__(self) -> str:
        return f"{self.label}({', '.join(map(str, self.args))})"


# -- domain ------------------------------------------------------------------------------


def build_domain(signifiers: Iterable[Signifier]) -> list[ActionSchema]:
    schemas, labels = [], set()
    for sig in signifiers:
        spec = sig.behavior_spec
        if spec.pddl is None:
            log.warning("signifier %s carries no PDDL action; skipped", sig.id)
            continue
        if spec.pddl.label in labels:
            raise DomainError("DuplicateAction", spec.pddl.label)
        labels.add(spec.pddl.label)
        schema = spec.input if isinstance(spec.input, ObjectSchema) else None
        schemas.append(ActionSchema(spec.pddl, spec.forms[0], schema))
    if not schemas:
        raise DomainError("EmptyDomain", "no signifier carries a PDDL action")
    return sorted(schemas, key=lambda s: s.label)


def _substitute(atoms: frozenset, binding: dict) -> frozenset:
    return frozenset(Atom(a.predicate, tuple(binding.get(x, x) for x in a.args)) for a in atoms)


def _payload(schema: ActionSchema, binding: dict) -> dict:
    out = {}
    for p in schema.spec.parameters:
        if p.property_name:
            out[p.property_name] = binding[p.name]
    if schema.input_schema is not None:
        for name in sorted(schema.input_schema.required - out.keys()):
            sub = schema.input_schema.property_schema(name)
            fixed = single_value(sub) if sub is not None else None
            if fixed is not None:
                out[name] = fixed
    return out


def _candidates(param, objects: dict) -> list:
    pool = objects.get(param.type_iri, [])
    enum = getattr(param.value_schema, "enum", None)
    if enum is not None:
        pool = [o for o in pool if o in enum]
    return pool


def ground(schemas: Iterable[ActionSchema], objects: dict) -> list[GroundAction]:
    """Type-compatible Cartesian grounding.

    Instances whose add and delete sets overlap, or whose execution input
    fails the signified schema, are dropped.
    """
    out = []
    for schema in schemas:
        params = schema.spec.parameters
        pools = [_candidates(p, objects) for p in params]
        for values in itertools.product(*pools):
            binding = {p.name: v for p, v in zip(params, values)}
            add = _substitute(schema.spec.add_effects, binding)
            delete = _substitute(schema.spec.del_effects, binding)
            if add & delete:
                continue
            payload = _payload(schema, binding)
            if schema.input_schema is not None and not validate_input(schema.input_schema, payload).conforms:
                continue
            out.append(
                GroundAction(
                    label=schema.label,
                    args=tuple(values),
                    preconditions=_substitute(schema.spec.preconditions, binding),
                    negative_preconditions=_substitute(schema.spec.negative_preconditions, binding),
                    add_effects=add,
                    del_effects=delete,
                    form=schema.form,
                    payload=payload,
                )
            )
    return sorted(out)


# -- search --------------------------------------------------------------------------


def plan(initial: Iterable[Atom], goal: Iterable[Atom], actions: Iterable[GroundAction], bound: int = DEFAULT_STATE_BOUND) -> list[GroundAction]:
    """Breadth-first search; the returned plan is length-minimal."""
    start, goal = frozenset(initial), frozenset(goal)
    actions = sorted(actions)
    if goal <= start:
        return []
    parents: dict = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for action in actions:
            if not action.applicable(state):
                continue
            nxt = action.apply(state)
            if nxt in parents:
                continue
            parents[nxt] = (state, action)
            if goal <= nxt:
                steps = []
                while parents[nxt] is not None:
                    nxt, act = parents[nxt]
                    steps.append(act)
                return steps[::-1]
            if len(parents) >= bound:
                raise NoPlan(len(parents), bound)
            queue.append(nxt)
    raise NoPlan(len(parents), bound)


def check_plan(initial: Iterable[Atom], goal: Iterable[Atom], steps: Iterable[GroundAction]) -> tuple[bool, State]:
    """Simulate ``steps``; valid when every step is applicable and the goal holds at the end."""
    state = frozenset(initial)
    for step in steps:
        if not step.applicable(state):
            return False, state
        state = step.apply(state)
    return frozenset(goal) <= state, state


# -- world state ----------------------------------------------------------------------


def situation_atoms(situation: Graph, artifact_iri: str) -> State:
    """Map the arm situation to atoms; the table lives in docs/domain-mapping.md."""
    arm = IRI(artifact_iri)
    atoms = set()
    gripper = situation.value(arm, IRI(MANU.hasGripperValue))
    if isinstance(gripper, Literal) and gripper.to_python() == 500:
        atoms.add(Atom("gripperOpen", ()))
    at = situation.value(arm, IRI(MANU.atLocation))
    if at is not None:
        atoms.add(Atom("armAt", (str(at),)))
    for held in situation.objects(arm, IRI(MANU.holding)):
        atoms.add(Atom("holding", (str(held),)))
    for item in situation.subjects(IRI(RDF_TYPE), IRI(MANU.Item)):
        for loc in situation.objects(item, IRI(MANU.hasLocation)):
            atoms.add(Atom("itemAt", (str(item), str(loc))))
    for loc in situation.subjects(IRI(MANU.inRangeOf), arm):
        atoms.add(Atom("inRange", (str(loc),)))
    return frozenset(atoms)


def object_universe(situation: Graph, schemas: Iterable[ActionSchema]) -> dict:
    """Typed objects: instances in the situation plus values that schemas enumerate."""
    objects: dict = {}
    for t in situation.match(None, IRI(RDF_TYPE), None):
        if isinstance(t.subject, IRI):
            objects.setdefault(t.object.value, set()).add(t.subject.value)
    for schema in schemas:
        for p in schema.spec.parameters:
            enum = getattr(p.value_schema, "enum", None)
            if enum:
                objects.setdefault(p.type_iri, set()).update(enum)
    return {k: sorted(v, key=lambda x: (type(x).__name__, x)) for k, v in objects.items()}
