"""PRS-lite agent: one plan library, steps bound to exposed signifiers at run time.

The agent knows *what* to do (the abstract plan) but not *how*: each step names
an action type, and the concrete form and input come from whichever exposed
signifier signifies an action of that type.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

from hypersig.agents.client import EnvClient, NoApplicableSignifier, RunResult, Trace, pick_form, situation_value
from hypersig.model import ArtifactProfile, Form, ObjectSchema, Signifier, single_value, validate_input
from hypersig.rdf import IRI
from hypersig.vocab import MANU, PRS


@dataclass(frozen=True)
class Desire:
    goal_type: str
    inputs: tuple  # item IRI, target location IRI

    def __post_init__(self):
        arity = PLAN_LIBRARY[self.goal_type].arity if self.goal_type in PLAN_LIBRARY else None
        if arity is not None and len(self.inputs) != arity:
            raise ValueError(f"{self.goal_type} takes {arity} inputs, got {len(self.inputs)}")


@dataclass(frozen=True)
class AbstractStep:
    action_type: str
    args: tuple = ()  # (property name, template) pairs; templates start with "?"


@dataclass(frozen=True)
class AbstractPlan:
    goal_type: str
    arity: int
    steps: tuple

    def __post_init__(self):
        if not self.steps:
            raise ValueError("a plan needs at least one step")


PICK_AND_PLACE = AbstractPlan(
    goal_type=MANU.PickAndPlace,
    arity=2,
    steps=(
        AbstractStep(MANU.MoveTo, (("target", "?item_location"),)),
        AbstractStep(MANU.CloseGripper),
        AbstractStep(MANU.MoveTo, (("target", "?target"),)),
        AbstractStep(MANU.OpenGripper),
    ),
)

PLAN_LIBRARY = {PICK_AND_PLACE.goal_type: PICK_AND_PLACE}


def profile_turtle(desire: Desire, item_location: Optional[str] = None) -> str:
    """Agent profile shaped like the reference PRS agent, plus a location belief."""
    item, target = desire.inputs
    belief = f"\n<{item}> a manu:Item ; manu:hasLocation <{item_location}> .\n" if item_location else ""
    return f"""\
@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
@prefix hmas: <https://purl.org/hmas/> .
@prefix hint: <https://purl.org/hmas/interaction#> .
@prefix prs: <https://example.org/prs#> .
@prefix manu: <https://example.org/manufacturing#> .

<> a hmas:AgentProfile ; hmas:isProfileOf <#agent> .

<#agent> a hmas:Agent ;
  hint:hasAbility [ a prs:PRSAbility ] ;
  hint:hasAbility [ a manu:OperatorAbility ] ;
  prs:hasDesire [ a prs:GoalAchievement, <{desire.goal_type}> ;
    prs:hasInputList ( <{item}> <{target}> ) ] .
{belief}"""


def bind_step(step: AbstractStep, profile: ArtifactProfile, values: dict) -> tuple[Signifier, Form, dict]:
    """Pick the most salient PRS signifier for ``step`` and build a conforming input."""
    label = step.action_type.rsplit("#", 1)[-1]
    candidates = [
        s
        for s in profile.signifiers
        if PRS.PRSAbility in s.recommended_abilities and step.action_type in s.behavior_spec.types
    ]
    if not candidates:
        raise NoApplicableSignifier(label)
    sig = candidates[0]  # exposure already sorted by salience
    schema = sig.behavior_spec.input
    payload = {name: values[tpl[1:]] if tpl.startswith("?") else tpl for name, tpl in step.args}
    if isinstance(schema, ObjectSchema):
        for name in sorted(schema.required - payload.keys()):
            sub = schema.property_schema(name)
            fixed = single_value(sub) if sub is not None else None
            if fixed is None:
                raise NoApplicableSignifier(label, f"cannot fill required input {name!r}")
            payload[name] = fixed
    if schema is not None and not validate_input(schema, payload).conforms:
        raise NoApplicableSignifier(label, f"input {payload} violates the signified schema")
    return sig, pick_form(sig), payload


class PrsAgent:
    def __init__(
        self,
        env_base: str,
        workspace: str,
        name: str = "prs-agent",
        sink: Optional[Callable[[dict], None]] = None,
        after_action: Optional[Callable[[dict], None]] = None,
    ):
        self.name = name
        self.trace = Trace(name, sink=sink)
        self.client = EnvClient(env_base, workspace, self.trace)
        self.after_action = after_action

    def run(self, desire: Desire) -> RunResult:
        started = time.monotonic()
        plan = PLAN_LIBRARY.get(desire.goal_type)
        if plan is None:
            raise NoApplicableSignifier(desire.goal_type, "no plan in the library")
        item, target = desire.inputs
        self.client.publish_profile(self.name, profile_turtle(desire))
        url, profile = self.client.discover_arm()
        item_location = situation_value(profile.situation, item, MANU.hasLocation)
        if item_location is not None:
            # keep believing where the item was, even once the arm holds it
            self.client.publish_profile(self.name, profile_turtle(desire, item_location))
        values = {"item": item, "target": target, "item_location": item_location}
        exposed = []
        actions = 0
        for step in plan.steps:
            profile = self.client.fetch_artifact(url)
            exposed.append(len(profile.signifiers))
            if self.client.token is None:
                self.client.login(profile)
            sig, form, payload = bind_step(step, profile, values)
            self.trace.emit("bound", step=step.action_type, signifier=str(sig.id), input=payload)
            out = self.client.invoke(step.action_type.rsplit("#", 1)[-1], form, payload)
            actions += 1
            if self.after_action is not None:
                self.after_action({"agent": self.name, "step": step.action_type, "response": out})

        final = self.client.fetch_artifact(url)
        placed = final.situation.value(IRI(item), IRI(MANU.hasLocation))
        reached = placed == IRI(target)
        self.trace.emit("verified", item=item, target=target, achieved=reached)
        return RunResult(
            agent=self.name,
            agent_iri=self.client.agent_iri or "",
            goal_achieved=reached,
            action_count=actions,
            plan_length=len(plan.steps),
            exposed_counts=exposed,
            wall_time=time.monotonic() - started,
            trace=self.trace,
        )
