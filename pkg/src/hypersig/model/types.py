from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

from hypersig.rdf import Graph, Term, is_absolute_iri


class ModelError(ValueError):
    """A graph does not describe a valid model object.

    ``kind`` names the failure, e.g. ``MissingBehaviorSpec``,
    ``DanglingReference``, ``NoProfileNode``, ``MultipleProfileNodes``,
    ``UnboundVariable``, ``InvalidSchema``.
    """

    def __init__(self, kind: str, detail: str = ""):
        super().__init__(f"{kind}: {detail}" if detail else kind)
        self.kind = kind
        self.detail = detail


# -- input schemas ------------------------------------------------------------


@dataclass(frozen=True)
class IntegerSchema:
    enum: Optional[frozenset] = None
    minimum: Optional[int] = None
    maximum: Optional[int] = None

    def __post_init__(self):
        if self.enum is not None and not self.enum:
            raise ModelError("InvalidSchema", "empty enum")


@dataclass(frozen=True)
class StringSchema:
    enum: Optional[frozenset] = None

    def __post_init__(self):
        if self.enum is not None and not self.enum:
            raise ModelError("InvalidSchema", "empty enum")


@dataclass(frozen=True)
class ObjectSchema:
    properties: tuple = ()  # (name, schema) pairs sorted by name
    required: frozenset = frozenset()

    @classmethod
    def of(cls, properties: Optional[dict] = None, required=()) -> "ObjectSchema":
        return cls(tuple(sorted((properties or {}).items())), frozenset(required))

    def property_schema(self, name: str):
        for key, schema in self.properties:
            if key == name:
                return schema
        return None

    @property
    def property_names(self) -> list[str]:
        return [k for k, _ in self.properties]


InputSchema = Union[ObjectSchema, IntegerSchema, StringSchema]


# -- actions --------------------------------------------------------------------


@dataclass(frozen=True)
class Form:
    target: str
    method: Optional[str] = None
    content_type: str = "application/json"


class Atom(NamedTuple):
    predicate: str
    args: tuple = ()

    def __str__(self) -> str:
        return f"{self.predicate}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class PddlParameter:
    name: str
    type_iri: str
    schema: Optional[InputSchema] = None
    property_name: Optional[str] = None

    @property
    def value_schema(self) -> Optional[InputSchema]:
        """Schema of the single JSON value this parameter fills."""
        if isinstance(self.schema, ObjectSchema) and self.property_name:
            return self.schema.property_schema(self.property_name)
        return self.schema


@dataclass(frozen=True)
class PddlActionSpec:
    label: str
    parameters: tuple = ()
    preconditions: frozenset = frozenset()
    negative_preconditions: frozenset = frozenset()
    add_effects: frozenset = frozenset()
    del_effects: frozenset = frozenset()

    @property
    def effects(self) -> frozenset:
        """Signed effects: ``(True, atom)`` adds, ``(False, atom)`` deletes."""
        return frozenset({(True, a) for a in self.add_effects} | {(False, a) for a in self.del_effects})

    @property
    def parameter_names(self) -> tuple:
        return tuple(p.name for p in self.parameters)


@dataclass(frozen=True)
class ActionSpecification:
    id: Term
    forms: tuple
    input: Optional[InputSchema] = None
    pddl: Optional[PddlActionSpec] = None
    types: frozenset = frozenset()

    def __post_init__(self):
        for form in self.forms:
            if not is_absolute_iri(form.target):
                raise ModelError("InvalidForm", f"relative form target {form.target!r}")
        if not self.forms:
            raise ModelError("MissingForm", f"action specification {self.id} has no form")


# -- signifiers and profiles ------------------------------------------------


@dataclass(frozen=True)
class Signifier:
    id: Term
    behavior_spec: ActionSpecification
    recommended_abilities: frozenset = frozenset()  # ability type IRIs
    recommended_contexts: frozenset = frozenset()
    salience: Optional[float] = None
    # resolved context shapes and the source subgraph; neither takes part in equality
    context_shapes: tuple = field(default=(), compare=False, repr=False)
    graph: Graph = field(default_factory=Graph, compare=False, repr=False)

    def __post_init__(self):
        if self.salience is not None and self.salience < 0:
            raise ModelError("InvalidSalience", f"{self.id}: salience {self.salience} < 0")


@dataclass(frozen=True)
class ArtifactProfile:
    iri: str
    artifact_iri: str
    signifiers: tuple = ()
    situation: Graph = field(default_factory=Graph)
    workspace_iri: Optional[str] = None

    def __post_init__(self):
        ids = [s.id for s in self.signifiers]
        if len(ids) != len(set(ids)):
            raise ModelError("DuplicateSignifier", f"profile {self.iri}")

    def signifier(self, sig_id) -> Optional[Signifier]:
        for s in self.signifiers:
            if s.id == sig_id or str(s.id) == str(sig_id):
                return s
        return None

    @property
    def signifier_ids(self) -> set:
        return {s.id for s in self.signifiers}


@dataclass(frozen=True)
class AgentProfile:
    iri: str
    agent_iri: str
    abilities: frozenset = frozenset()
    situation: Graph = field(default_factory=Graph)
    workspace_iri: Optional[str] = None


@dataclass(frozen=True)
class InteractionRecord:
    agent_iri: str
    target: str
    timestamp: float
    outcome: str  # "succeeded" | "failed"
    sequence: int = 0
    method: str = "PUT"
    status: int = 200
    arm_state: Optional[dict] = field(default=None, compare=False)


@dataclass
class Workspace:
    """Container of resources; interactions are append-only."""

    id: str
    contained_resources: dict = field(default_factory=dict)  # subject iri -> (kind, profile url)
    interactions: list = field(default_factory=list)
    description: Graph = field(default_factory=Graph)

    @property
    def agents(self) -> set:
        return {iri for iri, kind in self.contained_resources.items() if kind[0] == "agent"}

    @property
    def artifacts(self) -> set:
        return {iri for iri, kind in self.contained_resources.items() if kind[0] == "artifact"}

    def record(self, record: InteractionRecord) -> InteractionRecord:
        if self.interactions and record.timestamp < self.interactions[-1].timestamp:
            raise ValueError("interaction timestamps must be non-decreasing")
        self.interactions.append(record)
        return record
