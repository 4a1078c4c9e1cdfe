import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersig.agents.planner import (
    ActionSchema,
    DomainError,
    NoPlan,
    build_domain,
    check_plan,
    ground,
    object_universe,
    plan,
    situation_atoms,
)
from hypersig.model import Atom, Form, PddlActionSpec, PddlParameter
from hypersig.vocab import EX, MANU
from oracles import shortest_plan_length, simulate

L0, L1, L2, L3 = (EX.term(f"loc{i}") for i in range(4))
ITEM = EX.item1


def strips_signifiers(profile):
    return [s for s in profile.signifiers if s.behavior_spec.pddl is not None]


@pytest.fixture(scope="module")
def schemas(arm_profile):
    return build_domain(strips_signifiers(arm_profile))


def universe(locations, items):
    return {MANU.Location: sorted(locations), MANU.Item: sorted(items), MANU.GripperValue: [0, 500]}


def world(arm_at, item_locs, in_range, gripper_open=True):
    atoms = {Atom("armAt", (arm_at,))} | {Atom("inRange", (l,)) for l in in_range}
    atoms |= {Atom("itemAt", (i, l)) for i, l in item_locs.items()}
    if gripper_open:
        atoms.add(Atom("gripperOpen", ()))
    return frozenset(atoms)


# -- domain -------------------------------------------------------------------------


def test_three_schemas_from_arm(schemas):
    assert [s.label for s in schemas] == ["closeGripper", "moveTo", "openGripper"]
    move = next(s for s in schemas if s.label == "moveTo")
    assert [p.type_iri for p in move.spec.parameters] == [MANU.Location, MANU.Location]
    assert move.form.target.endswith("/leubot/base")


def test_non_pddl_signifier_skipped(arm_profile, caplog):
    with caplog.at_level(logging.WARNING):
        out = build_domain(arm_profile.signifiers)
    assert len(out) == 3
    assert "carries no PDDL action" in caplog.text


def test_empty_domain(arm_profile):
    generic = [s for s in arm_profile.signifiers if s.behavior_spec.pddl is None]
    with pytest.raises(DomainError) as err:
        build_domain(generic)
    assert err.value.kind == "EmptyDomain"


def test_duplicate_action(arm_profile):
    sig = strips_signifiers(arm_profile)[0]
    with pytest.raises(DomainError) as err:
        build_domain([sig, sig])
    assert err.value.kind == "DuplicateAction"


# -- grounding -------------------------------------------------------------------------


def one_param_schema():
    spec = PddlActionSpec(
        "visit",
        (PddlParameter("?l", MANU.Location),),
        add_effects=frozenset({Atom("visited", ("?l",))}),
    )
    return ActionSchema(spec, Form("http://x/visit"))


def test_ground_one_schema_two_locations():
    assert len(ground([one_param_schema()], {MANU.Location: [L0, L1]})) == 2


def test_ground_no_objects():
    assert ground([one_param_schema()], {}) == []


def test_arm_domain_six_ground_actions(schemas):
    actions = ground(schemas, universe({L0, L1}, {ITEM}))
    # moveTo: 2 ordered pairs of distinct locations; close and open: 1 item x 2 locations,
    # with the gripper value pinned by each schema's enum
    assert sorted(str(a) for a in actions) == sorted(
        [
            f"moveTo({L0}, {L1})",
            f"moveTo({L1}, {L0})",
            f"closeGripper(0, {ITEM}, {L0})",
            f"closeGripper(0, {ITEM}, {L1})",
            f"openGripper(500, {ITEM}, {L0})",
            f"openGripper(500, {ITEM}, {L1})",
        ]
    )


def test_ground_actions_effects_disjoint(schemas):
    for a in ground(schemas, universe({L0, L1, L2}, {ITEM, EX.item2})):
        assert not (a.add_effects & a.del_effects)


def test_ground_payloads_conform(schemas):
    actions = ground(schemas, universe({L0, L1}, {ITEM}))
    move = next(a for a in actions if a.label == "moveTo")
    assert move.payload == {"target": move.args[1]}
    close = next(a for a in actions if a.label == "closeGripper")
    assert close.payload == {"manu:hasGripperValue": 0}


# -- search ------------------------------------------------------------------------------


def test_pick_and_place_length_four(schemas):
    actions = ground(schemas, universe({L0, L1, L2}, {ITEM}))
    initial = world(L0, {ITEM: L1}, {L0, L1, L2})
    goal = {Atom("itemAt", (ITEM, L2))}
    steps = plan(initial, goal, actions)
    assert [s.label for s in steps] == ["moveTo", "closeGripper", "moveTo", "openGripper"]
    assert steps[0].args == (L0, L1) and steps[2].args == (L1, L2)
    assert len(steps) == shortest_plan_length(initial, goal, actions) == 4
    ok, final = simulate(initial, steps)
    assert ok and goal <= final
    assert check_plan(initial, goal, steps)[0]


def test_two_locations_one_item_length_four(schemas):
    actions = ground(schemas, universe({L0, L1}, {ITEM}))
    initial = world(L0, {ITEM: L1}, {L0, L1})
    goal = {Atom("itemAt", (ITEM, L0))}
    steps = plan(initial, goal, actions)
    assert len(steps) == shortest_plan_length(initial, goal, actions) == 4
    assert check_plan(initial, goal, steps)[0]


def test_goal_already_true(schemas):
    initial = world(L0, {ITEM: L1}, {L0, L1})
    assert plan(initial, {Atom("itemAt", (ITEM, L1))}, ground(schemas, universe({L0, L1}, {ITEM}))) == []


def test_out_of_range_goal(schemas):
    actions = ground(schemas, universe({L0, L1, L3}, {ITEM}))
    with pytest.raises(NoPlan) as err:
        plan(world(L0, {ITEM: L1}, {L0, L1}), {Atom("itemAt", (ITEM, L3))}, actions)
    assert err.value.explored <= err.value.bound


def test_state_bound_respected(schemas):
    actions = ground(schemas, universe({L0, L1, L2}, {ITEM, EX.item2}))
    initial = world(L0, {ITEM: L1, EX.item2: L0}, {L0, L1, L2})
    with pytest.raises(NoPlan) as err:
        plan(initial, {Atom("itemAt", (ITEM, L2)), Atom("itemAt", (EX.item2, L1))}, actions, bound=5)
    assert err.value.bound == 5 and err.value.explored <= 5


def test_check_plan_rejects_inapplicable(schemas):
    actions = ground(schemas, universe({L0, L1}, {ITEM}))
    close_far = next(a for a in actions if a.label == "closeGripper" and a.args[2] == L1)
    assert not check_plan(world(L0, {ITEM: L1}, {L0, L1}), set(), [close_far])[0]


def test_situation_atoms_of_arm(arm_profile):
    atoms = situation_atoms(arm_profile.situation, arm_profile.artifact_iri)
    assert atoms == {
        Atom("gripperOpen", ()),
        Atom("armAt", (L0,)),
        Atom("inRange", (L0,)),
        Atom("inRange", (L1,)),
        Atom("inRange", (L2,)),
        Atom("itemAt", (EX.item1, L1)),
        Atom("itemAt", (EX.item2, L0)),
        Atom("itemAt", (EX.item3, L3)),
    }


def test_object_universe_of_arm(arm_profile, schemas):
    objects = object_universe(arm_profile.situation, schemas)
    assert objects[MANU.Location] == [L0, L1, L2, L3]
    assert objects[MANU.GripperValue] == [0, 500]


# -- random fixture-scale problems ---------------------------------------------------------

LOCS = [L0, L1, L2]
ITEMS = [EX.item1, EX.item2]


@st.composite
def problems(draw):
    n_items = draw(st.integers(1, 2))
    items = ITEMS[:n_items]
    placed = {i: draw(st.sampled_from(LOCS)) for i in items}
    in_range = set(draw(st.sets(st.sampled_from(LOCS), min_size=1)))
    arm_at = draw(st.sampled_from(sorted(in_range)))
    goal_items = draw(st.sets(st.sampled_from(items), min_size=1, max_size=1 if n_items == 1 else 2))
    goal = {Atom("itemAt", (i, draw(st.sampled_from(LOCS)))) for i in goal_items}
    return items, world(arm_at, placed, in_range), goal


def _state_ok(state):
    at = [a for a in state if a.predicate == "armAt"]
    holding = [a for a in state if a.predicate == "holding"]
    return len(at) <= 1 and len(holding) <= 1 and not (holding and Atom("gripperOpen", ()) in state)


@settings(max_examples=300)
@given(problems())
def test_plans_valid_and_optimal(schemas, problem):
    items, initial, goal = problem
    actions = ground(schemas, universe(set(LOCS), set(items)))
    expected = shortest_plan_length(initial, goal, actions, max_depth=8)
    try:
        steps = plan(initial, goal, actions)
    except NoPlan:
        assert expected is None
        return
    assert len(steps) == expected
    ok, final = check_plan(initial, goal, steps)
    assert ok
    state = initial
    for s in steps:
        state = s.apply(state)
        assert _state_ok(state)
