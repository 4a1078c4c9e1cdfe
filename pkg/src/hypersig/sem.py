"""Signifier exposure: filter an artifact profile for one agent.

A signifier is exposed when the agent has every recommended ability and the
context score over the joint situation strictly exceeds the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional

from hypersig.model import AgentProfile, ArtifactProfile, Signifier
from hypersig.rdf import Graph
from hypersig.shapes import context_fraction

DEFAULT_THRESHOLD = 0.99


@dataclass(frozen=True)
class ExposureRequest:
    artifact_profile: ArtifactProfile
    agent_profile: Optional[AgentProfile] = None
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if not 0 <= self.threshold <= 1:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold}")


@dataclass(frozen=True)
class Decision:
    signifier_id: str
    ability_pass: bool
    context_score: float
    exposed: bool


@dataclass(frozen=True)
class ExposureResult:
    profile: ArtifactProfile
    trace: tuple = ()

    @property
    def exposed_ids(self) -> list[str]:
        return [str(s.id) for s in self.profile.signifiers]


def threshold_fraction(t) -> Fraction:
    """Read a float threshold as the decimal it prints as, so 0.3 means 3/10."""
    return Fraction(repr(t)) if isinstance(t, float) else Fraction(t)


def ability_match(recommended: Iterable[str], agent: Iterable[str]) -> bool:
    """Exact-IRI subset test; no subsumption."""
    return set(recommended) <= set(agent)


def salience_order(signifiers: Iterable[Signifier]) -> tuple:
    """Descending salience, unsalient last, ties broken by id for determinism."""
    return tuple(
        sorted(signifiers, key=lambda s: (s.salience is None, -(s.salience or 0.0), str(s.id)))
    )


def score(signifier: Signifier, artifact_situation: Graph, agent_situation: Graph) -> Fraction:
    return context_fraction(signifier.context_shapes, artifact_situation, agent_situation)


def expose(request: ExposureRequest) -> ExposureResult:
    profile = request.artifact_profile
    agent = request.agent_profile
    if agent is None:
        return ExposureResult(profile, ())
    t = threshold_fraction(request.threshold)
    kept, trace = [], []
    for sig in profile.signifiers:
        ok = ability_match(sig.recommended_abilities, agent.abilities)
        # the context is only evaluated for ability-compatible signifiers
        e = score(sig, profile.situation, agent.situation) if ok else Fraction(0)
        exposed = ok and e > t
        trace.append(Decision(str(sig.id), ok, float(e), exposed))
        if exposed:
            kept.append(sig)
    return ExposureResult(replace(profile, signifiers=salience_order(kept)), tuple(trace))


def expose_profile(
    profile: ArtifactProfile, agent: Optional[AgentProfile], threshold: float = DEFAULT_THRESHOLD
) -> ArtifactProfile:
    return expose(ExposureRequest(profile, agent, threshold)).profile
