"""Static grid environment: food, obstacles, danger zones and neighborhood queries.

A :class:`World` is immutable once generated. Perturbations that move food
build a new world with :func:`dataclasses.replace` rather than mutating one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple

import numpy as np

from stigmem.rng import substream

Position = tuple[int, int]

# Inclusive ranges for a world built from the reference environment.
FOOD_RANGE = (0.10, 0.15)
OBSTACLE_RANGE = (0.05, 0.08)
DANGER_RANGE = (0.03, 0.05)
DAMAGE_RANGE = (5, 15)


class ConfigError(ValueError):
    """Raised for infeasible world or model configurations."""


class Cell(NamedTuple):
    food: bool
    obstacle: bool
    danger_damage: int


@dataclass(frozen=True)
class WorldConfig:
    width: int = 15
    height: int = 15
    food_fraction: float = 0.125
    obstacle_fraction: float = 0.065
    danger_fraction: float = 0.04
    danger_damage_range: tuple[int, int] = DAMAGE_RANGE
    food_energy_value: float = 20.0
    topology: str = "bounded"

    def __post_init__(self) -> None:
        if self.width < 5 or self.height < 5:
            raise ConfigError(f"grid must be at least 5x5, got {self.width}x{self.height}")
        fractions = (self.food_fraction, self.obstacle_fraction, self.danger_fraction)
        if any(f < 0 for f in fractions):
            raise ConfigError(f"site fractions must be non-negative: {fractions}")
        if sum(fractions) >= 1.0:
            raise ConfigError(f"site fractions sum to {sum(fractions):.3f}, must be < 1")
        lo, hi = self.danger_damage_range
        if not 0 <= lo <= hi:
            raise ConfigError(f"bad danger damage range {self.danger_damage_range}")
        if self.topology not in ("bounded", "torus"):
            raise ConfigError(f"unknown topology {self.topology!r}")

    @classmethod
    def reference(cls, size: int = 15, **overrides) -> WorldConfig:
        """Square world with site fractions at the middle of the reference ranges."""
        return cls(width=size, height=size, **overrides)

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    def in_reference_ranges(self) -> bool:
        return (
            FOOD_RANGE[0] <= self.food_fraction <= FOOD_RANGE[1]
            and OBSTACLE_RANGE[0] <= self.obstacle_fraction <= OBSTACLE_RANGE[1]
            and DANGER_RANGE[0] <= self.danger_fraction <= DANGER_RANGE[1]
            and DAMAGE_RANGE[0] <= self.danger_damage_range[0]
            and self.danger_damage_range[1] <= DAMAGE_RANGE[1]
        )


def site_count(fraction: float, n_cells: int) -> int:
    """Round half up, so 22.5 cells becomes 23 regardless of parity."""
    return int(np.floor(fraction * n_cells + 0.5))


@dataclass(frozen=True)
class World:
    config: WorldConfig
    food_sites: frozenset[Position]
    obstacle_sites: frozenset[Position]
    danger_sites: dict[Position, int] = field(hash=False)

    @property
    def width(self) -> int:
        return self.config.width

    @property
    def height(self) -> int:
        return self.config.height

    @property
    def torus(self) -> bool:
        return self.config.topology == "torus"

    def contains(self, pos: Position) -> bool:
        x, y = pos
        return 0 <= x < self.config.width and 0 <= y < self.config.height

    def cell(self, x: int, y: int) -> Cell:
        if not self.contains((x, y)):
            raise IndexError(f"({x}, {y}) outside {self.width}x{self.height} grid")
        pos = (x, y)
        return Cell(pos in self.food_sites, pos in self.obstacle_sites, self.danger_sites.get(pos, 0))

    def free_cells(self) -> list[Position]:
        """Non-obstacle cells in lexicographic order."""
        return [
            (x, y)
            for x in range(self.width)
            for y in range(self.height)
            if (x, y) not in self.obstacle_sites
        ]

    def empty_cells(self) -> list[Position]:
        """Cells carrying no site of any kind, in lexicographic order."""
        taken = self.food_sites | self.obstacle_sites | self.danger_sites.keys()
        return [(x, y) for x in range(self.width) for y in range(self.height) if (x, y) not in taken]

    def distance(self, a: Position, b: Position) -> int:
        """Chebyshev distance, wrapped on a torus."""
        dx = abs(a[0] - b[0])
        dy = abs(a[1] - b[1])
        if self.torus:
            dx = min(dx, self.width - dx)
            dy = min(dy, self.height - dy)
        return max(dx, dy)

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "config": {
                "width": cfg.width,
                "height": cfg.height,
                "food_fraction": cfg.food_fraction,
                "obstacle_fraction": cfg.obstacle_fraction,
                "danger_fraction": cfg.danger_fraction,
                "danger_damage_range": list(cfg.danger_damage_range),
                "food_energy_value": cfg.food_energy_value,
                "topology": cfg.topology,
            },
            "food_sites": sorted([list(p) for p in self.food_sites]),
            "obstacle_sites": sorted([list(p) for p in self.obstacle_sites]),
            "danger_sites": [[x, y, d] for (x, y), d in sorted(self.danger_sites.items())],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> World:
        raw = dict(data["config"])
        raw["danger_damage_range"] = tuple(raw["danger_damage_range"])
        return cls(
            config=WorldConfig(**raw),
            food_sites=frozenset(tuple(p) for p in data["food_sites"]),
            obstacle_sites=frozenset(tuple(p) for p in data["obstacle_sites"]),
            danger_sites={(x, y): d for x, y, d in data["danger_sites"]},
        )


def _sample(rng: np.random.Generator, pool: list[Position], k: int) -> list[Position]:
    idx = rng.choice(len(pool), size=k, replace=False)
    return [pool[i] for i in sorted(idx.tolist())]


def generate_world(config: WorldConfig, seed: int) -> World:
    """Place food, then obstacles, then danger zones uniformly without replacement.

    Each placement draws only from cells still free, so the three site sets are
    disjoint by construction. The result depends only on ``(config, seed)``.
    """
    n = config.n_cells
    counts = [site_count(f, n) for f in (config.food_fraction, config.obstacle_fraction, config.danger_fraction)]
    if sum(counts) > n:
        raise ConfigError(f"{sum(counts)} sites requested on a {n}-cell grid")

    rng = substream(seed, "world")
    pool = [(x, y) for x in range(config.width) for y in range(config.height)]
    placed: list[list[Position]] = []
    for k in counts:
        chosen = _sample(rng, pool, k)
        taken = set(chosen)
        pool = [p for p in pool if p not in taken]
        placed.append(chosen)
    food, obstacles, danger = placed

    lo, hi = config.danger_damage_range
    damage = rng.integers(lo, hi + 1, size=len(danger)).tolist()
    return World(
        config=config,
        food_sites=frozenset(food),
        obstacle_sites=frozenset(obstacles),
        danger_sites=dict(zip(danger, damage)),
    )


def neighbors(world: World, pos: Position, radius: int = 1) -> list[Position]:
    """Moore neighborhood of ``pos`` (Chebyshev distance <= radius), excluding ``pos``.

    Positions come back in lexicographic ``(x, y)`` order. Obstacles are
    included; callers filter them. On a bounded grid out-of-range cells are
    clipped; on a torus every offset wraps, so the list always has
    ``(2r+1)**2 - 1`` entries.
    """
    if not world.contains(pos):
        raise IndexError(f"{pos} outside {world.width}x{world.height} grid")
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    return list(_moore(world.width, world.height, world.torus, pos, radius))


@lru_cache(maxsize=1 << 16)
def _moore(w: int, h: int, torus: bool, pos: Position, radius: int) -> tuple[Position, ...]:
    x, y = pos
    out = []
    if torus:
        for dx in range(-radius, radius + 1):
            for dy in range(-radius, radius + 1):
                if dx or dy:
                    out.append(((x + dx) % w, (y + dy) % h))
        return tuple(sorted(out))
    for nx in range(max(0, x - radius), min(w, x + radius + 1)):
        for ny in range(max(0, y - radius), min(h, y + radius + 1)):
            if nx != x or ny != y:
                out.append((nx, ny))
    return tuple(out)


def sample_spawns(world: World, n_agents: int, seed: int) -> list[Position]:
    """Spawn positions on site-free cells, from a stream independent of the model config."""
    if n_agents == 0:
        return []
    rng = substream(seed, "spawn")
    pool = world.empty_cells()
    if not pool:
        raise ConfigError("no site-free cell available for spawning")
    replace = n_agents > len(pool)
    idx = rng.choice(len(pool), size=n_agents, replace=replace).tolist()
    return [pool[i] for i in idx]


def disjoint(sets: Iterable[set]) -> bool:
    seen: set = set()
    for s in sets:
        if seen & s:
            return False
        seen |= s
    return True
