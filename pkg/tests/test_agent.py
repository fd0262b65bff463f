from __future__ import annotations

from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stigmem.agent import (
    E_MAX,
    EXPLORING,
    FORAGING,
    RESTING,
    RETURNING,
    AgentState,
    EnergyParams,
    ScoreWeights,
    TraitProfile,
    choose_move,
    deposit_strength,
    deposition_decision,
    legal_moves,
    score_position,
    select_state,
    task_desirability,
    update_energy,
)
from stigmem.memory import MemoryEntry, MemoryStore, add_or_reinforce
from stigmem.rng import substream
from stigmem.traces import TraceField, deposit
from stigmem.world import WorldConfig, generate_world

QUIET = ScoreWeights(noise=0.0)


def make_agent(pos=(4, 4), energy=100.0, tendency=0.5, memory=True, state=EXPLORING, **kw):
    store = MemoryStore() if memory else None
    return AgentState(0, pos, TraitProfile.uniform(tendency), memory=store, energy=energy, state=state, **kw)


def with_sites(world, **sites):
    return replace(world, **sites)


class TestEnergy:
    def test_move_only(self):
        assert update_energy(make_agent(), True, False, False, False).energy == 98.5

    def test_identity_without_base_cost(self):
        a = update_energy(make_agent(), False, False, False, False, params=EnergyParams(base=0.0))
        assert a.energy == 100

    def test_clamped_at_max(self):
        a = update_energy(make_agent(energy=149), False, False, True, False, params=EnergyParams(base=0.0))
        assert a.energy == E_MAX

    def test_every_term(self):
        a = update_energy(make_agent(energy=50), True, True, True, True, danger_damage=7)
        assert a.energy == pytest.approx(50 - 1 - 2 - 0.5 + 20 + 3 - 7)

    def test_death_at_zero(self):
        a = update_energy(make_agent(energy=5), True, False, False, False, danger_damage=10)
        assert a.energy == 0 and not a.alive

    @pytest.mark.parametrize("damage", [-1, 16])
    def test_damage_range(self, damage):
        with pytest.raises(ValueError):
            update_energy(make_agent(), False, False, False, False, danger_damage=damage)


@settings(max_examples=100, deadline=None)
@given(
    e=st.floats(0, 150),
    flags=st.tuples(st.booleans(), st.booleans(), st.booleans(), st.booleans()),
    damage=st.floats(0, 15),
)
def test_energy_stays_in_bounds(e, flags, damage):
    a = update_energy(make_agent(energy=e), *flags, danger_damage=damage)
    assert 0.0 <= a.energy <= E_MAX
    assert a.alive == (a.energy > 0)


class TestSelectState:
    def test_low_energy_rests(self):
        assert select_state(make_agent(energy=10)) == RESTING

    def test_carrying_returns(self):
        assert select_state(make_agent(energy=80, carrying_food=True)) == RETURNING

    def test_high_energy_full_tendency_explores(self):
        assert select_state(make_agent(energy=120, tendency=1.0), draw=0.99) == EXPLORING

    def test_hungry_forages(self):
        assert select_state(make_agent(energy=40, tendency=1.0)) == FORAGING

    def test_foraging_agent_keeps_foraging(self):
        assert select_state(make_agent(energy=120, tendency=1.0, state=FORAGING)) == FORAGING

    @pytest.mark.parametrize("draw, expected", [(0.29, EXPLORING), (0.31, FORAGING)])
    def test_draw_against_tendency(self, draw, expected):
        assert select_state(make_agent(energy=100, tendency=0.3), draw) == expected

    def test_resting_beats_carrying(self):
        assert select_state(make_agent(energy=5, carrying_food=True)) == RESTING


class TestScorePosition:
    def test_all_zero(self, open_world):
        a = make_agent(memory=False, tendency=0.0, state=RESTING)
        assert score_position(a, (4, 5), open_world, None, 0.0) == 0

    def test_food_memory_term(self, open_world):
        a = make_agent(state=FORAGING, tendency=0.0)
        add_or_reinforce(a.memory, MemoryEntry((4, 5), "food", 0, 1.0))
        assert score_position(a, (4, 5), open_world, None, 0.0) == pytest.approx(15.0)
        fed = with_sites(open_world, food_sites=frozenset({(4, 5)}))
        assert score_position(a, (4, 5), fed, None, 0.0) == pytest.approx(25.0)

    def test_danger_site(self, open_world):
        a = make_agent(memory=False, tendency=0.0, state=RESTING)
        w = with_sites(open_world, danger_sites={(4, 5): 10})
        assert score_position(a, (4, 5), w, None, 0.0) == -50

    def test_danger_trace(self, open_world):
        a = make_agent(memory=False, tendency=0.0, state=RESTING)
        f = deposit(TraceField(), (4, 5), "danger", 1.0, 9, 0)
        assert score_position(a, (4, 5), open_world, f, 0.0) == pytest.approx(-8.0)

    def test_social_cap(self, open_world):
        a = make_agent(memory=False, tendency=0.5, state=RESTING)
        assert score_position(a, (4, 5), open_world, None, 0.0, nearby_agents=7) == pytest.approx(1.5)

    def test_noise(self, open_world):
        a = make_agent(memory=False, tendency=0.0, state=RESTING)
        assert score_position(a, (4, 5), open_world, None, 0.5) == pytest.approx(1.0)

    def test_obstacle_rejected(self, open_world):
        w = with_sites(open_world, obstacle_sites=frozenset({(4, 5)}))
        with pytest.raises(ValueError):
            score_position(make_agent(), (4, 5), w, None, 0.0)


class TestTaskDesirability:
    def test_exploring_unvisited(self, open_world):
        a = make_agent()
        assert task_desirability(a, (4, 5), EXPLORING, open_world) == 1.0
        assert task_desirability(a, (4, 4), EXPLORING, open_world) == 0.0

    def test_returning_gradient(self, open_world):
        a = make_agent(pos=(4, 4), spawn=(0, 0))
        closer = task_desirability(a, (3, 3), RETURNING, open_world)
        stay = task_desirability(a, (4, 4), RETURNING, open_world)
        away = task_desirability(a, (5, 5), RETURNING, open_world)
        assert closer == 1.0 > stay > away > 0

    def test_resting_zero(self, open_world):
        assert task_desirability(make_agent(), (4, 5), RESTING, open_world) == 0.0


class TestChooseMove:
    def test_single_legal_neighbor(self, open_world):
        walls = {p for p in [(0, 1), (1, 0)]}
        w = with_sites(open_world, obstacle_sites=frozenset(walls))
        a = make_agent(pos=(0, 0), memory=False, state=EXPLORING)
        a.visited[(0, 0)] = 0
        assert choose_move(a, w, None, [0.0] * 9, weights=QUIET) == (1, 1)

    def test_walled_in_stays(self, open_world):
        w = with_sites(open_world, obstacle_sites=frozenset({(0, 1), (1, 0), (1, 1)}))
        assert choose_move(make_agent(pos=(0, 0)), w, None, [0.5] * 9) == (0, 0)

    def test_tie_goes_lexicographically_first(self, open_world):
        a = make_agent(pos=(4, 4), memory=False, state=EXPLORING)
        cands = legal_moves(open_world, a.position)
        got = choose_move(a, open_world, None, [0.0] * 9, weights=QUIET)
        best = max(score_position(a, p, open_world, None, 0.0, weights=QUIET) for p in cands)
        assert got == min(p for p in cands if score_position(a, p, open_world, None, 0.0, weights=QUIET) == best)
        assert got == (3, 3)

    def test_food_memory_wins_for_forager(self, open_world):
        a = make_agent(pos=(4, 4), state=FORAGING, tendency=0.0)
        add_or_reinforce(a.memory, MemoryEntry((5, 5), "food", 0, 1.0))
        assert choose_move(a, open_world, None, [0.0] * 9, weights=QUIET) == (5, 5)

    def test_resting_stays(self, open_world):
        assert choose_move(make_agent(state=RESTING), open_world, None, [0.9] * 9) == (4, 4)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), state=st.sampled_from([EXPLORING, FORAGING, RETURNING]))
def test_choose_move_is_argmax_of_score_position(seed, state):
    """The inlined scoring in choose_move agrees with score_position on every candidate."""
    world = generate_world(WorldConfig(width=9, height=9, danger_fraction=0.15), seed)
    rng = substream(seed, "test")
    free = world.free_cells()
    pos = free[int(rng.integers(len(free)))]
    a = make_agent(pos=pos, state=state, tendency=float(rng.uniform(0.3, 1.0)), spawn=free[0])
    for q in free[:12]:
        add_or_reinforce(a.memory, MemoryEntry(q, "food", 0, float(rng.uniform(0.3, 1.0))))
    f = TraceField()
    for q in free[::5]:
        deposit(f, q, "danger", 0.9, int(rng.integers(3)), 0)
    draws = rng.random(9).tolist()
    cands = legal_moves(world, pos)
    scores = [score_position(a, p, world, f, draws[i]) for i, p in enumerate(cands)]
    best = max(scores)
    assert choose_move(a, world, f, draws) == cands[scores.index(best)]


class TestDeposition:
    def test_carrying_alone(self):
        assert deposition_decision(make_agent(energy=60, carrying_food=True), 0, 0.9) == ["food"]

    def test_carrying_with_exploration_roll(self):
        assert deposition_decision(make_agent(energy=60, carrying_food=True), 0, 0.1) == ["food", "exploration"]

    def test_low_energy(self):
        assert deposition_decision(make_agent(energy=10), 0, 0.9) == ["danger"]

    def test_nothing(self):
        assert deposition_decision(make_agent(energy=100), 0, 0.9) == []

    def test_crowd(self):
        assert deposition_decision(make_agent(energy=100), 2, 0.9) == ["social"]

    @pytest.mark.parametrize("e, s", [(0, 0.7), (75, 0.85), (150, 1.0)])
    def test_strength_from_energy(self, e, s):
        assert deposit_strength(e) == pytest.approx(s)


def test_trait_sampling_range():
    t = TraitProfile.sample(substream(1, "traits"))
    vals = [t.exploration_tendency, t.memory_trust, t.cooperation_tendency, *t.social_learning.values()]
    assert all(0.3 <= v <= 1.0 for v in vals)


def test_trait_validation():
    with pytest.raises(ValueError):
        TraitProfile.uniform(1.5)
