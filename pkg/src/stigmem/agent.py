"""Agents: energy bookkeeping, behavioral states, position scoring and trace deposition."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from stigmem.memory import CATEGORIES, SCORE_SIGN, MemoryStore, memory_score, memory_scores
from stigmem.traces import TraceField, consensus, consensus_value
from stigmem.world import Position, World, neighbors

E_MAX = 150.0
E_INIT = 100.0

EXPLORING = "exploring"
FORAGING = "foraging"
RETURNING = "returning"
RESTING = "resting"
STATES = (EXPLORING, FORAGING, RETURNING, RESTING)

# Memory categories that matter in each state. Summing every attractive
# entry pins an agent to the middle of its own trail, so only task-relevant
# categories attract: food while foraging, nothing while homing or exploring
# (the novelty term covers exploring). Remembered danger always repels.
_DANGER_ONLY = {"food": 0.0, "danger": SCORE_SIGN["danger"], "social": 0.0, "exploration": 0.0}
STATE_SIGNS = {
    FORAGING: {**_DANGER_ONLY, "food": SCORE_SIGN["food"]},
    RETURNING: _DANGER_ONLY,
    EXPLORING: _DANGER_ONLY,
    RESTING: dict(SCORE_SIGN),
}

TRAIT_RANGE = (0.3, 1.0)
EXPLORATION_TRACE_PROB = 0.30


@dataclass(frozen=True)
class EnergyParams:
    move: float = 1.0
    trace: float = 2.0
    base: float = 0.5
    regen: float = 3.0
    food: float = 20.0
    rest_below: float = 15.0
    forage_below: float = 60.0


@dataclass(frozen=True)
class ScoreWeights:
    task_foraging: float = 10.0
    task_exploring: float = 8.0
    task_returning: float = 10.0
    memory: float = 15.0
    noise: float = 2.0
    danger_site: float = 50.0
    danger_trace: float = 10.0
    social_cap: int = 3

    def task(self, state: str) -> float:
        if state == FORAGING:
            return self.task_foraging
        if state == EXPLORING:
            return self.task_exploring
        if state == RETURNING:
            return self.task_returning
        return 0.0


@dataclass
class TraitProfile:
    exploration_tendency: float
    social_learning: dict[str, float]
    memory_trust: float
    cooperation_tendency: float

    def __post_init__(self) -> None:
        values = [self.exploration_tendency, self.memory_trust, self.cooperation_tendency]
        values += [self.social_learning[c] for c in CATEGORIES]
        if any(not 0.0 <= v <= 1.0 for v in values):
            raise ValueError(f"traits must lie in [0, 1]: {values}")

    @classmethod
    def sample(cls, rng: np.random.Generator) -> TraitProfile:
        lo, hi = TRAIT_RANGE
        u = rng.uniform(lo, hi, size=7).tolist()
        return cls(
            exploration_tendency=u[0],
            social_learning=dict(zip(CATEGORIES, u[1:5])),
            memory_trust=u[5],
            cooperation_tendency=u[6],
        )

    @classmethod
    def uniform(cls, value: float) -> TraitProfile:
        return cls(value, {c: value for c in CATEGORIES}, value, value)


@dataclass
class AgentState:
    id: int
    position: Position
    traits: TraitProfile
    memory: MemoryStore | None = None
    spawn: Position | None = None
    energy: float = E_INIT
    state: str = EXPLORING
    carrying_food: bool = False
    alive: bool = True
    # last step at which each cell was occupied by this agent
    visited: dict[Position, int] = field(default_factory=dict)
    food_collected: int = 0
    moves: int = 0
    coordination_moves: int = 0

    def __post_init__(self) -> None:
        if self.spawn is None:
            self.spawn = self.position
        self.visited.setdefault(self.position, 0)


def update_energy(
    a: AgentState,
    moved: bool,
    deposited: bool,
    ate: bool,
    rested: bool,
    danger_damage: float = 0.0,
    params: EnergyParams = EnergyParams(),
) -> AgentState:
    """Apply one step of energy costs and gains, clamped to ``[0, E_MAX]``."""
    if not 0 <= danger_damage <= 15:
        raise ValueError(f"danger damage {danger_damage} outside [0, 15]")
    e = (
        a.energy
        - params.move * moved
        - params.trace * deposited
        - params.base
        + params.food * ate
        + params.regen * rested
        - danger_damage
    )
    a.energy = min(E_MAX, max(0.0, e))
    if a.energy <= 0.0:
        a.alive = False
    return a


def select_state(a: AgentState, draw: float = 0.0, params: EnergyParams = EnergyParams()) -> str:
    """Pick the behavioral state from energy, load and the previous state.

    Hunger and load come first. Above the foraging threshold an exploring
    agent keeps exploring with probability equal to its exploration tendency
    (``draw`` is a uniform variate in [0, 1)), and an agent that just
    delivered food starts a new bout the same way. Otherwise it forages
    until it picks something up.
    """
    e = a.energy
    if e < params.rest_below:
        return RESTING
    if a.carrying_food:
        return RETURNING
    if e < params.forage_below:
        return FORAGING
    if a.state in (EXPLORING, RETURNING):
        return EXPLORING if draw < a.traits.exploration_tendency else FORAGING
    return FORAGING


def task_desirability(a: AgentState, p: Position, state: str, world: World) -> float:
    if state == FORAGING:
        return 1.0 if p in world.food_sites else 0.0
    if state == RETURNING:
        # 1 for the step that best closes on home, falling off per extra cell
        here = world.distance(a.position, a.spawn)
        best = max(0, here - 1)
        return 1.0 / (1 + world.distance(p, a.spawn) - best)
    if state == EXPLORING:
        return 0.0 if p in a.visited else 1.0
    return 0.0


def _task_values(a: AgentState, cands: Sequence[Position], state: str, world: World) -> list[float]:
    """``task_desirability`` for every candidate, sharing the per-agent work."""
    if state == FORAGING:
        food = world.food_sites
        return [1.0 if p in food else 0.0 for p in cands]
    if state == RETURNING:
        best = max(0, world.distance(a.position, a.spawn) - 1)
        return [1.0 / (1 + world.distance(p, a.spawn) - best) for p in cands]
    if state == EXPLORING:
        seen = a.visited
        return [0.0 if p in seen else 1.0 for p in cands]
    return [0.0] * len(cands)


def danger_penalty(p: Position, world: World, traces: TraceField | None, weights: ScoreWeights) -> float:
    d = weights.danger_site if p in world.danger_sites else 0.0
    if traces is not None:
        d += weights.danger_trace * consensus(traces, p, "danger")
    return d


def score_position(
    a: AgentState,
    p: Position,
    world: World,
    traces: TraceField | None,
    rng_draw: float,
    *,
    weights: ScoreWeights = ScoreWeights(),
    state: str | None = None,
    nearby_agents: int = 0,
    memory_term: float | None = None,
    now: int = 0,
) -> float:
    """Weighted sum of noise, task desirability, memory, social attraction and danger.

    ``memory_term`` overrides the agent's own memory score, which is how
    memory-less agents feed sensed traces through the same channel.
    ``nearby_agents`` counts other agents within radius 2 of ``p``.
    """
    if p in world.obstacle_sites:
        raise ValueError(f"cannot score obstacle cell {p}")
    state = state or a.state
    if memory_term is None:
        memory_term = memory_score(a.memory, p, now, STATE_SIGNS[state]) if a.memory is not None else 0.0
    social = a.traits.cooperation_tendency * min(weights.social_cap, nearby_agents)
    return (
        weights.noise * rng_draw
        + weights.task(state) * task_desirability(a, p, state, world)
        + weights.memory * memory_term
        + social
        - danger_penalty(p, world, traces, weights)
    )


def legal_moves(world: World, pos: Position) -> list[Position]:
    """Non-obstacle Moore-1 neighbors plus staying put, in lexicographic order."""
    cands = [p for p in neighbors(world, pos, 1) if p not in world.obstacle_sites]
    cands.append(pos)
    cands.sort()
    return cands


def choose_move(
    a: AgentState,
    world: World,
    traces: TraceField | None,
    draws: Sequence[float],
    *,
    weights: ScoreWeights = ScoreWeights(),
    crowd: Sequence[Sequence[int]] | None = None,
    memory_terms: Sequence[float] | None = None,
    now: int = 0,
    candidates: Sequence[Position] | None = None,
) -> Position:
    """Return the highest-scoring legal cell; ties go to the lexicographically smallest.

    ``draws`` supplies one uniform variate per candidate, consumed in
    candidate order. ``crowd[x][y]`` is the number of agents within radius 2
    of ``(x, y)`` including this agent, which is subtracted out.
    ``candidates`` may pass in precomputed :func:`legal_moves`.
    """
    if a.state == RESTING:
        return a.position
    cands = candidates if candidates is not None else legal_moves(world, a.position)
    if memory_terms is None:
        if a.memory is not None:
            memory_terms = memory_scores(a.memory, cands, a.position, STATE_SIGNS[a.state])
        else:
            memory_terms = [0.0] * len(cands)
    # same terms as score_position, with the per-agent parts hoisted out of the loop
    state = a.state
    task_w = weights.task(state)
    coop = a.traits.cooperation_tendency
    cap = weights.social_cap
    task = _task_values(a, cands, state, world)
    cells = traces.cells if traces is not None else {}
    params = traces.params if traces is not None else None
    best, best_score = a.position, -np.inf
    for i, p in enumerate(cands):
        danger = weights.danger_site if p in world.danger_sites else 0.0
        here = cells.get(p)
        if here and "danger" in here:
            danger += weights.danger_trace * consensus_value(here["danger"], params)
        nearby = crowd[p[0]][p[1]] - 1 if crowd is not None else 0
        if nearby > cap:
            nearby = cap
        s = (
            weights.noise * draws[i]
            + task_w * task[i]
            + weights.memory * memory_terms[i]
            + coop * nearby
            - danger
        )
        if s > best_score:
            best, best_score = p, s
    return best


def deposit_strength(energy: float) -> float:
    return min(1.0, max(0.7, 0.7 + 0.3 * energy / E_MAX))


def deposition_decision(a: AgentState, nearby_agents: int, draw: float) -> list[str]:
    """Trace categories this agent leaves this step, in canonical category order."""
    out = []
    if a.carrying_food and a.energy > 50:
        out.append("food")
    if a.energy < 20:
        out.append("danger")
    if nearby_agents >= 2:
        out.append("social")
    if draw < EXPLORATION_TRACE_PROB:
        out.append("exploration")
    return out
