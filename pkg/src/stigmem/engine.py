"""Seeded simulation loop, ablation presets and per-run records.

Within a step the phases run in a fixed order:

1. shuffle the living agents with the run stream and draw each agent's
   block of uniforms;
2. for each agent in turn: choose a state, move, take danger damage, pick
   up or deliver food, record direct observations, deposit traces, read
   traces into memory, pay energy, decay and prune memory;
3. decay the trace field;
4. record the metrics row and drop agents that died.

Scheduled perturbations fire at the top of their trigger step.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from stigmem import metrics
from stigmem.agent import (
    FORAGING,
    RESTING,
    AgentState,
    EnergyParams,
    ScoreWeights,
    TraitProfile,
    choose_move,
    deposit_strength,
    deposition_decision,
    legal_moves,
    select_state,
    update_energy,
)
from stigmem.memory import (
    CategoryParams,
    MemoryEntry,
    MemoryStore,
    add_or_reinforce,
    decay_and_prune,
)
from stigmem.rng import substream
from stigmem.traces import (
    COORDINATION_THRESHOLD,
    TraceField,
    decay_traces,
    deposit,
    integrate_trace_into_memory,
    max_consensus,
    sensed_traces,
)
from stigmem.world import ConfigError, World, WorldConfig, generate_world, neighbors, sample_spawns

PRESETS = (
    "full_memory",
    "enhanced_memory",
    "memory_no_traces",
    "limited_memory",
    "no_memory",
    "traces_only",
    "random_movement",
)
PERTURBATIONS = ("none", "agent_failure", "trace_corruption", "dynamic_food")

# uniforms per agent per step: state, 9 candidate noises, exploration trace, random move
DRAWS_PER_AGENT = 12
OBSERVE_RADIUS = 1
SENSE_RADIUS = 2

SERIES = (
    "food_collected",
    "coverage",
    "coordination_events",
    "moves",
    "total_trace_mass",
    "mean_energy",
    "alive_count",
    "entropy",
    "memory_entries",
    "max_memory_entries",
)


@dataclass(frozen=True)
class ModelConfig:
    world: WorldConfig = field(default_factory=WorldConfig)
    n_agents: int = 7
    steps: int = 100
    memory_enabled: bool = True
    traces_enabled: bool = True
    memory_capacity: int = 50
    w_mem: float = 15.0
    food_decay: float = 0.985
    random_movement: bool = False
    seed: int = 0
    preset: str = "custom"
    perturb: str = "none"
    perturb_fraction: float = 0.0
    perturb_step: int = 50
    relocate_interval: int = 25
    window: int = 25

    def __post_init__(self) -> None:
        if self.n_agents < 0 or self.steps < 0:
            raise ConfigError("n_agents and steps must be non-negative")
        if self.memory_capacity < 1:
            raise ConfigError("memory_capacity must be >= 1")
        if not 0.0 < self.food_decay < 1.0:
            raise ConfigError("food_decay must lie in (0, 1)")
        if self.perturb not in PERTURBATIONS:
            raise ConfigError(f"unknown perturbation {self.perturb!r}; expected one of {PERTURBATIONS}")
        if not 0.0 <= self.perturb_fraction <= 1.0:
            raise ConfigError("perturb_fraction must lie in [0, 1]")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")

    @property
    def density(self) -> float:
        return self.n_agents / self.world.n_cells

    def with_(self, **changes) -> ModelConfig:
        return replace(self, **changes)


def build_configuration(name: str, **overrides) -> ModelConfig:
    """One of the seven ablation presets, optionally with field overrides."""
    base = dict(memory_enabled=True, traces_enabled=True, memory_capacity=50, w_mem=15.0, food_decay=0.985)
    variants = {
        "full_memory": {},
        "enhanced_memory": dict(w_mem=20.0, food_decay=0.99),
        "memory_no_traces": dict(traces_enabled=False),
        "limited_memory": dict(memory_capacity=10),
        "no_memory": dict(memory_enabled=False, traces_enabled=False),
        "traces_only": dict(memory_enabled=False),
        "random_movement": dict(memory_enabled=False, traces_enabled=False, random_movement=True),
    }
    if name not in variants:
        raise ConfigError(f"unknown preset {name!r}; expected one of {PRESETS}")
    return ModelConfig(preset=name, **{**base, **variants[name], **overrides})


@dataclass
class RunRecord:
    config: dict
    n_agents: int
    series: dict[str, list] = field(default_factory=lambda: {k: [] for k in SERIES})
    final: dict[str, float | None] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> RunRecord:
        return cls(**json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("step",) + SERIES)
        for i in range(len(self.series["coverage"])):
            w.writerow([i] + [_fmt(self.series[k][i]) for k in SERIES])
        return buf.getvalue()


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def config_summary(cfg: ModelConfig) -> dict:
    out = {f.name: getattr(cfg, f.name) for f in fields(cfg) if f.name != "world"}
    out.update({f"world_{k}": v for k, v in asdict(cfg.world).items()})
    out["world_danger_damage_range"] = list(cfg.world.danger_damage_range)
    out["density"] = cfg.density
    return out


class Simulation:
    """A single seeded run. Not thread-safe; run many in separate processes."""

    def __init__(
        self,
        config: ModelConfig,
        energy: EnergyParams | None = None,
        weights: ScoreWeights | None = None,
    ):
        self.config = config
        self.energy = energy or EnergyParams(food=config.world.food_energy_value)
        self.weights = weights or ScoreWeights(memory=config.w_mem)
        self.world: World = generate_world(config.world, config.seed)
        spawns = sample_spawns(self.world, config.n_agents, config.seed)
        trait_rng = substream(config.seed, "traits")
        mem_params = CategoryParams().with_decay("food", config.food_decay)
        self.agents: list[AgentState] = []
        for i, pos in enumerate(spawns):
            traits = TraitProfile.sample(trait_rng)
            store = MemoryStore(config.memory_capacity, mem_params) if config.memory_enabled else None
            self.agents.append(AgentState(id=i, position=pos, traits=traits, memory=store))
        self.field: TraceField | None = TraceField(shape=(self.world.width, self.world.height)) if config.traces_enabled else None
        self.rng = substream(config.seed, "run")
        self.perturb_rng = substream(config.seed, "perturb")
        self.t = 0
        self.covered: set = set(spawns)
        self.n_free = len(self.world.free_cells())
        self.record = RunRecord(config=config_summary(config), n_agents=config.n_agents)
        self.perturbation_log: list[dict] = []
        self._step_food = 0
        self._step_coord = 0
        self._step_moves = 0
        self._moves: dict = {}
        self._ring: dict = {}

    def _legal(self, pos):
        # obstacles never move, so each cell's options are computed once
        cands = self._moves.get(pos)
        if cands is None:
            cands = self._moves[pos] = legal_moves(self.world, pos)
        return cands

    @property
    def alive(self) -> list[AgentState]:
        return [a for a in self.agents if a.alive]

    def crowd(self) -> list[list[int]]:
        """Agents within Chebyshev radius 2 of every cell, from current positions."""
        w, h = self.world.width, self.world.height
        occ = np.zeros((w, h), dtype=np.int64)
        for a in self.agents:
            if a.alive:
                occ[a.position] += 1
        r = SENSE_RADIUS
        mode = "wrap" if self.world.torus else "constant"
        padded = np.pad(occ, r, mode=mode)
        c = padded.cumsum(0).cumsum(1)
        c = np.pad(c, ((1, 0), (1, 0)))
        k = 2 * r + 1
        box = c[k:, k:] - c[:-k, k:] - c[k:, :-k] + c[:-k, :-k]
        return box.tolist()

    # -- the step -----------------------------------------------------------

    def step(self) -> None:
        from stigmem import perturb

        if self.t >= self.config.steps:
            raise RuntimeError(f"run already completed {self.config.steps} steps")
        perturb.apply_scheduled(self)
        t = self.t
        order = [a for a in self.agents if a.alive]
        self.rng.shuffle(order)
        draws = self.rng.random((len(order), DRAWS_PER_AGENT)).tolist()
        crowd = self.crowd()
        self._step_food = self._step_coord = self._step_moves = 0
        for a, row in zip(order, draws):
            self._act(a, row, crowd, t)
        if self.field is not None:
            decay_traces(self.field, t)
        self._collect(t)
        self.agents = [a for a in self.agents if a.alive]
        self.t += 1

    def _act(self, a: AgentState, row: list[float], crowd: list[list[int]], t: int) -> None:
        cfg = self.config
        world = self.world
        fld = self.field
        a.state = select_state(a, row[0], self.energy)

        if a.state == RESTING:
            target = a.position
        elif cfg.random_movement:
            opts = [p for p in self._legal(a.position) if p != a.position] or [a.position]
            target = opts[int(row[11] * len(opts))]
        else:
            target = choose_move(
                a, world, fld, row[1:10],
                weights=self.weights, crowd=crowd, now=t, candidates=self._legal(a.position),
            )

        moved = target != a.position
        if moved:
            a.moves += 1
            self._step_moves += 1
            if fld is not None and self._guided(a, target):
                a.coordination_moves += 1
                self._step_coord += 1
            a.position = target
        pos = a.position
        self.covered.add(pos)
        if a.memory is not None:
            for cat_bucket in a.memory.entries.values():
                e = cat_bucket.get(pos)
                if e is not None and e.created_at < t:
                    e.used = True

        damage = world.danger_sites.get(pos, 0)
        ate = False
        if a.state == FORAGING and not a.carrying_food and pos in world.food_sites:
            a.carrying_food = True
            ate = True
        if a.carrying_food and pos == a.spawn:
            a.carrying_food = False
            a.food_collected += 1
            self._step_food += 1

        nearby = crowd[pos[0]][pos[1]] - 1
        if a.memory is not None:
            self._observe(a, pos, damage, ate, nearby, t)

        deposited = False
        if fld is not None:
            cats = deposition_decision(a, nearby, row[10])
            if cats:
                sigma = deposit_strength(a.energy)
                for cat in cats:
                    deposit(fld, pos, cat, sigma, a.id, t)
                deposited = True
            if a.memory is not None:
                for q, cat, c in sensed_traces(fld, world, pos, SENSE_RADIUS, strongest_only=True):
                    integrate_trace_into_memory(a, q, cat, c, t)

        update_energy(a, moved, deposited, ate, a.state == RESTING, damage, self.energy)
        a.visited[pos] = t
        if a.memory is not None:
            decay_and_prune(a.memory, t)

    def _guided(self, a: AgentState, target) -> bool:
        """Whether a move lands on consensus above the coordination threshold.

        Agents without memory have no pathway by which traces could draw them
        anywhere (danger traces only repel), so their moves never count.
        """
        if a.memory is None:
            return False
        return max_consensus(self.field, target) > COORDINATION_THRESHOLD

    def _observe(self, a: AgentState, pos, damage: float, ate: bool, nearby: int, t: int) -> None:
        """Direct experience: food seen nearby, damage taken, crowding, and novel cells.

        Danger is remembered only where it hurt. Remembering every danger cell
        in view rings the agent's routes with repulsive halos.
        """
        store = a.memory
        world = self.world
        trust = a.traits.memory_trust
        if ate:
            add_or_reinforce(store, MemoryEntry(pos, "food", t, 1.0))
        if damage:
            add_or_reinforce(store, MemoryEntry(pos, "danger", t, 1.0))
        ring = self._ring.get(pos)
        if ring is None:
            ring = self._ring[pos] = neighbors(world, pos, OBSERVE_RADIUS)
        for q in ring:
            if q in world.food_sites:
                add_or_reinforce(store, MemoryEntry(q, "food", t, trust))
        if nearby >= 2:
            add_or_reinforce(store, MemoryEntry(pos, "social", t, a.traits.cooperation_tendency))
        if pos not in a.visited:
            add_or_reinforce(store, MemoryEntry(pos, "exploration", t, a.traits.exploration_tendency))

    def _collect(self, t: int) -> None:
        s = self.record.series
        alive = [a for a in self.agents if a.alive]
        s["food_collected"].append(self._step_food)
        s["coverage"].append(len(self.covered) / self.n_free if self.n_free else 0.0)
        s["coordination_events"].append(self._step_coord)
        s["moves"].append(self._step_moves)
        s["total_trace_mass"].append(self.field.mass() if self.field is not None else 0.0)
        s["mean_energy"].append(sum(a.energy for a in alive) / len(alive) if alive else 0.0)
        s["alive_count"].append(len(alive))
        s["entropy"].append(metrics.information_entropy(alive) if self.config.memory_enabled else 0.0)
        sizes = [len(a.memory) for a in alive if a.memory is not None]
        s["memory_entries"].append(sum(sizes))
        s["max_memory_entries"].append(max(sizes, default=0))

    # -- whole runs -----------------------------------------------------------

    def finalize(self) -> RunRecord:
        rec = self.record
        if self.t == 0:
            rec.final = {k: 0.0 for k in FINAL_KEYS}
            return rec
        fresh, eff = metrics.memory_quality(self.agents, self.t)
        sizes = [len(a.memory) for a in self.agents if a.memory is not None]
        e_cov = metrics.exploration_coverage(rec)
        f_eff = metrics.food_efficiency(rec)
        c_evt = metrics.coordination_events(rec)
        rec.final = {
            "performance": metrics.performance_score(e_cov, f_eff, c_evt),
            "food_efficiency": f_eff,
            "exploration_coverage": e_cov,
            "coordination_events": c_evt,
            "order_parameter": metrics.order_parameter(rec),
            "fresh_strong_fraction": fresh,
            "memory_efficiency": eff,
            "mean_memory_entries": sum(sizes) / len(sizes) if sizes else 0.0,
            "final_alive": float(len(self.agents)),
        }
        if self.config.perturb != "none":
            from stigmem.perturb import run_resilience

            # None (JSON null) when the pre-trigger window scored nothing
            rec.final["resilience"] = run_resilience(self)
        return rec


FINAL_KEYS = (
    "performance",
    "food_efficiency",
    "exploration_coverage",
    "coordination_events",
    "order_parameter",
    "fresh_strong_fraction",
    "memory_efficiency",
    "mean_memory_entries",
    "final_alive",
)


def run(config: ModelConfig, **kwargs) -> RunRecord:
    sim = Simulation(config, **kwargs)
    for _ in range(config.steps):
        sim.step()
    return sim.finalize()


# -- flat key/value config files -------------------------------------------------

_WORLD_KEYS = {f.name for f in fields(WorldConfig)}
_MODEL_KEYS = {f.name for f in fields(ModelConfig)} - {"world"}


def _coerce(value: str, like):
    if isinstance(like, bool):
        v = value.strip().lower()
        if v in ("1", "true", "yes", "on"):
            return True
        if v in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"not a boolean: {value!r}")
    if isinstance(like, int):
        return int(value)
    if isinstance(like, float):
        return float(value)
    return value.strip()


def parse_config(text: str) -> ModelConfig:
    """Parse ``key = value`` lines; ``preset`` picks the base, other keys override it.

    World keys are the :class:`WorldConfig` field names, with the damage range
    given as ``danger_damage_min`` and ``danger_damage_max``.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string("[model]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    items = dict(cp["model"])
    base = build_configuration(items.pop("preset")) if "preset" in items else ModelConfig()
    world_kw, model_kw = {}, {}
    wdefault = base.world
    lo, hi = wdefault.danger_damage_range
    for key, raw in items.items():
        if key == "danger_damage_min":
            lo = int(raw)
        elif key == "danger_damage_max":
            hi = int(raw)
        elif key in _WORLD_KEYS and key != "danger_damage_range":
            world_kw[key] = _coerce(raw, getattr(wdefault, key))
        elif key in _MODEL_KEYS:
            model_kw[key] = _coerce(raw, getattr(base, key))
        else:
            raise ConfigError(f"unknown config key {key!r}")
    world = replace(wdefault, danger_damage_range=(lo, hi), **world_kw)
    return replace(base, world=world, **model_kw)


def format_config(cfg: ModelConfig) -> str:
    lines = []
    for f in fields(cfg):
        if f.name != "world":
            lines.append(f"{f.name} = {getattr(cfg, f.name)}")
    for f in fields(WorldConfig):
        v = getattr(cfg.world, f.name)
        if f.name == "danger_damage_range":
            lines.append(f"danger_damage_min = {v[0]}")
            lines.append(f"danger_damage_max = {v[1]}")
        else:
            lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


def load_config(path) -> ModelConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


