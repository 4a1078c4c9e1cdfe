"""Client agents: a PRS-lite agent and a STRIPS planning agent."""

from hypersig.agents.client import AgentError, ExecutionFailed, NoApplicableSignifier, RunResult, Trace
from hypersig.agents.planner import (
    ActionSchema,
    DomainError,
    GroundAction,
    NoPlan,
    build_domain,
    check_plan,
    ground,
    object_universe,
    plan,
    situation_atoms,
)
from hypersig.agents.prs import PICK_AND_PLACE, PLAN_LIBRARY, AbstractPlan, AbstractStep, Desire, PrsAgent
from hypersig.agents.strips import StripsAgent

__all__ = [
    "AbstractPlan",
    "AbstractStep",
    "ActionSchema",
    "AgentError",
    "Desire",
    "DomainError",
    "ExecutionFailed",
    "GroundAction",
    "NoApplicableSignifier",
    "NoPlan",
    "PICK_AND_PLACE",
    "PLAN_LIBRARY",
    "PrsAgent",
    "RunResult",
    "StripsAgent",
    "Trace",
    "build_domain",
    "check_plan",
    "ground",
    "object_universe",
    "plan",
    "situation_atoms",
]
