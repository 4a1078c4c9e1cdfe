import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersig import fixtures as fx
from hypersig.agents.prs import profile_turtle
from hypersig.agents.strips import PROFILE as STRIPS_PROFILE
from hypersig.model import ActionSpecification, AgentProfile, ArtifactProfile, Form, Signifier, read_agent_profile
from hypersig.rdf import IRI, Graph, Triple, parse_turtle
from hypersig.scenario import PRS_DESIRE
from hypersig.sem import DEFAULT_THRESHOLD, ExposureRequest, ability_match, expose, expose_profile, salience_order
from hypersig.shapes import NodeTarget, PropertyConstraint, Shape
from hypersig.vocab import MANU, PRS, STRIPS
from oracles import expected_exposed

AGENT_URL = "http://localhost:8080/workspaces/manufacturing/agents/a"
LST2_ABILITIES = {PRS.PRSAbility, MANU.OperatorAbility}


def short(ids):
    return {str(i).rsplit("#", 1)[1] for i in ids}


def test_ability_match_examples():
    assert ability_match(set(), {"http://x/any"})
    assert ability_match({PRS.PRSAbility, MANU.OperatorAbility}, LST2_ABILITIES)
    assert not ability_match({STRIPS.StripsPlanningAbility}, LST2_ABILITIES)


def test_no_agent_returns_profile_unchanged(arm_profile):
    result = expose(ExposureRequest(arm_profile, None))
    assert result.profile is arm_profile
    assert result.trace == ()


def test_prs_agent_exposure(arm_profile):
    agent = read_agent_profile(parse_turtle(profile_turtle(PRS_DESIRE), base=AGENT_URL))
    exposed = short(s.id for s in expose_profile(arm_profile, agent).signifiers)
    assert exposed == {"login-sig", "close-sig", "move-sig", "prs-close-sig", "prs-move-sig"}


def test_prs_agent_without_desire_loses_prs_family(arm_profile):
    agent = AgentProfile(AGENT_URL, AGENT_URL + "#agent", frozenset(LST2_ABILITIES))
    exposed = short(s.id for s in expose_profile(arm_profile, agent).signifiers)
    assert exposed == {"login-sig", "close-sig", "move-sig"}


def test_strips_agent_exposure(arm_profile):
    agent = read_agent_profile(parse_turtle(STRIPS_PROFILE, base=AGENT_URL))
    exposed = short(s.id for s in expose_profile(arm_profile, agent).signifiers)
    assert exposed == {"login-sig", "strips-move-sig", "strips-close-sig", "strips-open-sig"}


def test_salience_ordering(arm_profile):
    agent = read_agent_profile(parse_turtle(profile_turtle(PRS_DESIRE), base=AGENT_URL))
    saliences = [s.salience for s in expose_profile(arm_profile, agent).signifiers]
    assert saliences == sorted(saliences, reverse=True)


def test_missing_salience_sorts_last():
    a, b = _sig("a", salience=None), _sig("b", salience=0.1)
    assert [s.id for s in salience_order([a, b])] == [b.id, a.id]


def test_situation_identity(arm_profile):
    agent = AgentProfile(AGENT_URL, AGENT_URL + "#agent")
    assert expose_profile(arm_profile, agent).situation is arm_profile.situation


def test_threshold_one_exposes_nothing_context_bound(arm_profile):
    agent = AgentProfile(AGENT_URL, AGENT_URL + "#agent", frozenset({MANU.OperatorAbility}))
    exposed = short(s.id for s in expose_profile(arm_profile, agent, 1.0).signifiers)
    # E = 1 is not > 1, so even context-free signifiers vanish
    assert exposed == set()


def test_threshold_range():
    with pytest.raises(ValueError):
        ExposureRequest(ArtifactProfile("http://x/p", "http://x/a"), None, 1.5)


def test_trace_records_each_signifier(arm_profile):
    agent = AgentProfile(AGENT_URL, AGENT_URL + "#agent")
    result = expose(ExposureRequest(arm_profile, agent, DEFAULT_THRESHOLD))
    assert len(result.trace) == len(arm_profile.signifiers)
    for d in result.trace:
        assert d.exposed == (d.ability_pass and d.context_score > DEFAULT_THRESHOLD)


# -- algebraic properties over synthetic profiles -------------------------------------

ABILITIES = [f"http://x/ability{i}" for i in range(4)]
FACTS = [Triple(IRI(f"http://x/n{i}"), IRI("http://x/p"), IRI("http://x/v")) for i in range(4)]
SPEC = ActionSpecification(IRI("http://x/act"), (Form("http://x/form"),))


def fact_shape(i: int) -> Shape:
    return Shape(
        IRI(f"http://x/shape{i}"),
        frozenset({NodeTarget(IRI(f"http://x/n{i}"))}),
        property_constraints=(PropertyConstraint("http://x/p", min_count=1),),
    )


def _sig(name, abilities=(), contexts=(), salience=None):
    return Signifier(
        IRI(f"http://x/sig/{name}"),
        SPEC,
        frozenset(ABILITIES[i] for i in abilities),
        frozenset(IRI(f"http://x/shape{i}") for i in contexts),
        salience,
        context_shapes=tuple(fact_shape(i) for i in sorted(set(contexts))),
    )


signifier_specs = st.lists(
    st.tuples(
        st.sets(st.integers(0, 3), max_size=3),
        st.lists(st.integers(0, 3), max_size=3, unique=True),
        st.none() | st.floats(0, 1),
    ),
    max_size=6,
)
ability_sets = st.sets(st.integers(0, 3))
fact_sets = st.sets(st.integers(0, 3))
thresholds = st.sampled_from([0.0, 0.25, 0.3, 0.5, 0.6, 0.99, 1.0]) | st.floats(0, 1)


def build(specs, facts):
    sigs = tuple(_sig(str(k), a, c, s) for k, (a, c, s) in enumerate(specs))
    situation = Graph({FACTS[i] for i in facts})
    return ArtifactProfile("http://x/profile", "http://x/artifact", sigs, situation)


def agent_with(abilities):
    return AgentProfile("http://x/agp", "http://x/ag", frozenset(ABILITIES[i] for i in abilities))


def ids(profile):
    return {s.id for s in profile.signifiers}


@settings(max_examples=1000)
@given(signifier_specs, ability_sets, fact_sets, thresholds)
def test_subset(specs, abilities, facts, t):
    profile = build(specs, facts)
    out = expose_profile(profile, agent_with(abilities), t)
    assert set(out.signifiers) <= set(profile.signifiers)
    oracle = expected_exposed(
        {f"http://x/sig/{k}": ({ABILITIES[i] for i in a}, set(c)) for k, (a, c, _) in enumerate(specs)},
        {ABILITIES[i] for i in abilities},
        facts,
        t,
    )
    assert {str(i) for i in ids(out)} == oracle


@settings(max_examples=1000)
@given(signifier_specs, ability_sets, fact_sets, thresholds)
def test_idempotence(specs, abilities, facts, t):
    agent = agent_with(abilities)
    once = expose_profile(build(specs, facts), agent, t)
    assert expose_profile(once, agent, t) == once


@settings(max_examples=1000)
@given(signifier_specs, ability_sets, ability_sets, fact_sets, thresholds)
def test_ability_monotonicity(specs, small, extra, facts, t):
    profile = build(specs, facts)
    low = expose_profile(profile, agent_with(small), t)
    high = expose_profile(profile, agent_with(small | extra), t)
    assert ids(low) <= ids(high)


@settings(max_examples=1000)
@given(signifier_specs, ability_sets, fact_sets, thresholds, thresholds)
def test_threshold_antitonicity(specs, abilities, facts, t1, t2):
    t1, t2 = sorted((t1, t2))
    profile = build(specs, facts)
    agent = agent_with(abilities)
    assert ids(expose_profile(profile, agent, t2)) <= ids(expose_profile(profile, agent, t1))


@settings(max_examples=200)
@given(ability_sets, fact_sets, st.floats(0, 1, exclude_max=True))
def test_unconstrained_signifier_always_exposed(abilities, facts, t):
    profile = build([(set(), [], None)], facts)
    assert len(expose_profile(profile, agent_with(abilities), t).signifiers) == 1
