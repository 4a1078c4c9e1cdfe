"""Simulated two-position robot arm and its situation graph."""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass, field
from typing import Optional

from hypersig.model import IntegerSchema, ObjectSchema, StringSchema, validate_input
from hypersig.rdf import IRI, Graph, Literal, Triple
from hypersig.vocab import MANU, RDF_TYPE

OPEN = 500
CLOSED = 0
GRIPPER_KEY = "manu:hasGripperValue"

# the endpoint accepts both positions; the signifiers narrow it per action
GRIPPER_SCHEMA = ObjectSchema.of({GRIPPER_KEY: IntegerSchema(enum=frozenset({OPEN, CLOSED}))}, [GRIPPER_KEY])
MOVE_SCHEMA = ObjectSchema.of({"target": StringSchema()}, ["target"])

_TYPE = IRI(RDF_TYPE)


class ArmError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class ArmState:
    artifact_iri: str
    gripper: int = OPEN
    at_location: Optional[str] = None
    holding: Optional[str] = None
    item_locations: dict = field(default_factory=dict)
    in_range: frozenset = frozenset()
    operator_tokens: set = field(default_factory=set)
    version: int = 0

    def check(self) -> None:
        if self.holding is not None and self.gripper != CLOSED:
            raise AssertionError("holding an item with an open gripper")
        if self.gripper not in (OPEN, CLOSED):
            raise AssertionError(f"gripper at {self.gripper}")

    def snapshot(self) -> dict:
        return {
            "gripper": self.gripper,
            "at_location": self.at_location,
            "holding": self.holding,
            "item_locations": dict(sorted(self.item_locations.items())),
            "version": self.version,
        }


def state_from_situation(situation: Graph, artifact_iri: str) -> ArmState:
    arm = IRI(artifact_iri)
    gripper = situation.value(arm, IRI(MANU.hasGripperValue))
    at = situation.value(arm, IRI(MANU.atLocation))
    holding = situation.value(arm, IRI(MANU.holding))
    items = {}
    for item in situation.subjects(_TYPE, IRI(MANU.Item)):
        loc = situation.value(item, IRI(MANU.hasLocation))
        if isinstance(loc, IRI) and item != holding:
            items[str(item)] = loc.value
    in_range = {
        str(loc)
        for loc in situation.subjects(IRI(MANU.inRangeOf), arm)
        if IRI(MANU.Location) in situation.types(loc)
    }
    value = gripper.to_python() if isinstance(gripper, Literal) else OPEN
    state = ArmState(
        artifact_iri=artifact_iri,
        gripper=value if value in (OPEN, CLOSED) else OPEN,
        at_location=at.value if isinstance(at, IRI) else None,
        holding=holding.value if isinstance(holding, IRI) else None,
        item_locations=items,
        in_range=frozenset(in_range),
    )
    if state.holding is not None:
        state.gripper = CLOSED
    return state


def situation_from_state(situation: Graph, state: ArmState) -> Graph:
    """Rewrite the state-bearing triples of ``situation`` to match ``state``."""
    arm = IRI(state.artifact_iri)
    stale = set()
    for pred in (MANU.hasGripperValue, MANU.atLocation, MANU.holding):
        stale |= situation.match(arm, IRI(pred), None)
    stale |= {
        t for t in situation.match(None, IRI(MANU.hasLocation), None) if IRI(MANU.Item) in situation.types(t.subject)
    }
    fresh = {Triple(arm, IRI(MANU.hasGripperValue), Literal.of(state.gripper))}
    if state.at_location:
        fresh.add(Triple(arm, IRI(MANU.atLocation), IRI(state.at_location)))
    if state.holding:
        fresh.add(Triple(arm, IRI(MANU.holding), IRI(state.holding)))
    for item, loc in state.item_locations.items():
        fresh.add(Triple(IRI(item), IRI(MANU.hasLocation), IRI(loc)))
    return situation.with_triples(add=fresh, remove=stale)


class Arm:
    """Thread-safe wrapper; every public method is atomic."""

    def __init__(self, state: ArmState):
        self._state = state
        self._lock = threading.Lock()

    @property
    def artifact_iri(self) -> str:
        return self._state.artifact_iri

    def snapshot(self) -> dict:
        with self._lock:
            return self._state.snapshot()

    def login(self) -> str:
        token = secrets.token_hex(16)
        with self._lock:
            self._state.operator_tokens.add(token)
        return token

    def _authorize(self, token: Optional[str]) -> None:
        if not token or token not in self._state.operator_tokens:
            raise ArmError(401, "missing or unknown operator token")

    def set_gripper(self, token: Optional[str], body) -> ArmState:
        report = validate_input(GRIPPER_SCHEMA, body)
        with self._lock:
            self._authorize(token)
            if not report.conforms:
                raise ArmError(422, "; ".join(v.message for v in report.violations))
            s = self._state
            value = body[GRIPPER_KEY]
            if value == CLOSED and s.gripper == OPEN:
                here = sorted(i for i, loc in s.item_locations.items() if loc == s.at_location)
                if not here:
                    raise ArmError(409, f"no item at {s.at_location}")
                s.holding = here[0]
                del s.item_locations[here[0]]
            elif value == CLOSED:
                raise ArmError(409, "gripper already closed")
            elif s.holding is not None:
                s.item_locations[s.holding] = s.at_location
                s.holding = None
            s.gripper = value
            return self._commit()

    def move(self, token: Optional[str], body) -> ArmState:
        report = validate_input(MOVE_SCHEMA, body)
        with self._lock:
            self._authorize(token)
            if not report.conforms:
                raise ArmError(422, "; ".join(v.message for v in report.violations))
            target = body["target"]
            if target not in self._state.in_range:
                raise ArmError(422, f"{target} is not an in-range location")
            self._state.at_location = target
            return self._commit()

    def _commit(self) -> ArmState:
        self._state.version += 1
        self._state.check()
        s = self._state
        return ArmState(
            artifact_iri=s.artifact_iri,
            gripper=s.gripper,
            at_location=s.at_location,
            holding=s.holding,
            item_locations=dict(s.item_locations),
            in_range=s.in_range,
            version=s.version,
        )
