"""Agent that plans over signified PDDL actions, then executes the plan over HTTP."""

from __future__ import annotations

import time
from typing import Callable, Iterable, Optional

from hypersig.agents.client import EnvClient, RunResult, Trace
from hypersig.agents.planner import (
    DEFAULT_STATE_BOUND,
    build_domain,
    ground,
    object_universe,
    plan,
    situation_atoms,
)
from hypersig.model import Atom
from hypersig.vocab import STRIPS

PROFILE = """\
@prefix hmas: <https://purl.org/hmas/> .
@prefix hint: <https://purl.org/hmas/interaction#> .
@prefix strips: <https://example.org/strips#> .

<> a hmas:AgentProfile ; hmas:isProfileOf <#agent> .

<#agent> a hmas:Agent ;
  hint:hasAbility [ a strips:StripsPlanningAbility ] .
"""


class StripsAgent:
    ability = STRIPS.StripsPlanningAbility

    def __init__(
        self,
        env_base: str,
        workspace: str,
        name: str = "strips-agent",
        sink: Optional[Callable[[dict], None]] = None,
        after_action: Optional[Callable[[dict], None]] = None,
        as_agent: bool = True,
        state_bound: int = DEFAULT_STATE_BOUND,
    ):
        self.name = name
        self.trace = Trace(name, sink=sink)
        self.client = EnvClient(env_base, workspace, self.trace)
        self.after_action = after_action
        self.as_agent = as_agent
        self.state_bound = state_bound

    def run(self, goal: Iterable[Atom]) -> RunResult:
        started = time.monotonic()
        goal = frozenset(goal)
        self.client.publish_profile(self.name, PROFILE)
        url, profile = self.client.discover_arm(self.as_agent)
        exposed = [len(profile.signifiers)]

        schemas = build_domain(profile.signifiers)
        objects = object_universe(profile.situation, schemas)
        actions = ground(schemas, objects)
        initial = situation_atoms(profile.situation, profile.artifact_iri)
        self.trace.emit("domain", schemas=[s.label for s in schemas], ground_actions=len(actions))
        steps = plan(initial, goal, actions, self.state_bound)
        self.trace.emit("plan", steps=[str(s) for s in steps])

        for step in steps:
            if self.client.token is None:
                self.client.login(profile)
            out = self.client.invoke(str(step), step.form, step.payload)
            if self.after_action is not None:
                self.after_action({"agent": self.name, "step": str(step), "response": out})

        final = self.client.fetch_artifact(url, self.as_agent)
        reached = goal <= situation_atoms(final.situation, final.artifact_iri)
        self.trace.emit("verified", goal=[str(a) for a in sorted(goal)], achieved=reached)
        return RunResult(
            agent=self.name,
            agent_iri=self.client.agent_iri or "",
            goal_achieved=reached,
            action_count=len(steps),
            plan_length=len(steps),
            exposed_counts=exposed,
            wall_time=time.monotonic() - started,
            trace=self.trace,
        )
