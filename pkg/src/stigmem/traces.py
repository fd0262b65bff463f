"""Environmental trace field: deposition, decay, consensus and memory integration."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from stigmem.memory import CATEGORIES, MAX_STRENGTH, MemoryEntry, add_or_reinforce

Position = tuple[int, int]

TRACE_DECAY = {"food": 0.97, "danger": 0.99, "social": 0.93, "exploration": 0.95}
TRACE_MAX_AGE = {"food": 70, "danger": 100, "social": 40, "exploration": 50}
SIGMA_MIN = 0.1
SIGMA_RANGE = (0.7, 1.0)
AMPLIFICATION = 0.3
CONSENSUS_CAP = 2.0
SOLO_DISCOUNT = 0.8
BASE_TRACE_STRENGTH = 0.5
COORDINATION_THRESHOLD = 1.2

_CAT_INDEX = {c: i for i, c in enumerate(CATEGORIES)}


@dataclass(frozen=True)
class TraceParams:
    decay: dict[str, float] = field(default_factory=lambda: dict(TRACE_DECAY))
    max_age: dict[str, int] = field(default_factory=lambda: dict(TRACE_MAX_AGE))
    sigma_min: float = SIGMA_MIN
    alpha: float = AMPLIFICATION
    cap: float = CONSENSUS_CAP
    solo_discount: float = SOLO_DISCOUNT

    def __post_init__(self) -> None:
        for cat, d in self.decay.items():
            if not 0.0 < d < 1.0:
                raise ValueError(f"trace decay for {cat} must lie in (0, 1), got {d}")
        if self.alpha <= 0:
            raise ValueError("amplification must be positive")


@dataclass
class TraceDeposit:
    position: Position
    category: str
    strength: float
    agent_id: int
    time: int


class TraceField:
    """Sparse per-cell, per-category deposits, one per depositing agent.

    ``cells[pos][category][agent_id] = [strength, time]``. Empty inner maps
    are removed eagerly, so ``pos in field.cells`` means the cell holds traces.
    """

    def __init__(self, params: TraceParams | None = None, shape: tuple[int, int] | None = None):
        self.params = params or TraceParams()
        self.cells: dict[Position, dict[str, dict[int, list]]] = {}
        # optional dense copy of every cell's consensus, one plane per category,
        # which lets sensing take window maxima with numpy
        self.grid = np.zeros((len(CATEGORIES), *shape)) if shape is not None else None
        # total strength as of the last decay, or None once anything changed since
        self._mass: float | None = 0.0

    def refresh(self) -> None:
        """Rebuild the consensus grid; call after editing ``cells`` directly."""
        self._mass = None
        if self.grid is None:
            return
        self.grid.fill(0.0)
        for (x, y), cats in self.cells.items():
            for cat, deps in cats.items():
                self.grid[_CAT_INDEX[cat], x, y] = consensus_value(deps, self.params)

    def __len__(self) -> int:
        return sum(len(d) for cats in self.cells.values() for d in cats.values())

    def deposits(self) -> list[TraceDeposit]:
        out = []
        for pos in sorted(self.cells):
            for cat in CATEGORIES:
                for aid, (s, t) in sorted(self.cells[pos].get(cat, {}).items()):
                    out.append(TraceDeposit(pos, cat, s, aid, t))
        return out

    def at(self, pos: Position, category: str) -> dict[int, list]:
        cats = self.cells.get(pos)
        if cats is None:
            return {}
        return cats.get(category, {})

    def mass(self) -> float:
        if self._mass is not None:
            return self._mass
        return sum(s for cats in self.cells.values() for d in cats.values() for s, _ in d.values())

    def snapshot_rows(self, step: int) -> list[tuple]:
        """Rows ``(step, x, y, category, total_strength, n_depositors)`` for CSV export."""
        rows = []
        for (x, y) in sorted(self.cells):
            for cat in CATEGORIES:
                d = self.cells[(x, y)].get(cat)
                if d:
                    rows.append((step, x, y, cat, sum(s for s, _ in d.values()), len(d)))
        return rows


def deposit(field: TraceField, pos: Position, cat: str, sigma: float, agent_id: int, t: int) -> TraceField:
    """Record a deposit; an agent's repeat deposit at the same cell and category replaces its last one."""
    lo, hi = SIGMA_RANGE
    if not lo <= sigma <= hi:
        raise ValueError(f"trace strength {sigma} outside [{lo}, {hi}]")
    if cat not in CATEGORIES:
        raise ValueError(f"unknown trace category {cat!r}")
    deps = field.cells.setdefault(pos, {}).setdefault(cat, {})
    deps[agent_id] = [sigma, t]
    field._mass = None
    if field.grid is not None:
        field.grid[_CAT_INDEX[cat], pos[0], pos[1]] = consensus_value(deps, field.params)
    return field


def decay_traces(field: TraceField, t: int) -> TraceField:
    """One decay step; drops deposits at or below ``sigma_min`` or past their category age."""
    p = field.params
    grid = field.grid
    if grid is not None:
        grid.fill(0.0)
    # survivors are summed in the same order mass() walks them, so the cached total is exact
    mass = 0.0
    empty_cells = []
    for pos, cats in field.cells.items():
        empty_cats = []
        for cat, deps in cats.items():
            rate = p.decay[cat]
            oldest = t - p.max_age[cat]
            dead = []
            for aid, rec in deps.items():
                s = rec[0] * rate
                rec[0] = s
                if s <= p.sigma_min or rec[1] < oldest:
                    dead.append(aid)
                else:
                    mass += s
            for aid in dead:
                del deps[aid]
            if not deps:
                empty_cats.append(cat)
            elif grid is not None:
                grid[_CAT_INDEX[cat], pos[0], pos[1]] = consensus_value(deps, p)
        for cat in empty_cats:
            del cats[cat]
        if not cats:
            empty_cells.append(pos)
    for pos in empty_cells:
        del field.cells[pos]
    field._mass = mass
    return field


def consensus_value(deps: dict[int, list], params: TraceParams) -> float:
    n = len(deps)
    if n == 0:
        return 0.0
    if n >= 2:
        return min(params.cap, 1.0 + params.alpha * (n - 1))
    (s, _), = deps.values()
    return params.solo_discount * s


def consensus(field: TraceField, pos: Position, cat: str) -> float:
    """Agreement strength of ``cat`` traces at ``pos``.

    Two or more distinct depositors amplify toward the cap; a lone deposit is
    discounted to ``0.8 * mean strength``.
    """
    return consensus_value(field.at(pos, cat), field.params)


def max_consensus(field: TraceField, pos: Position) -> float:
    """Largest consensus over all categories at ``pos``; 0 for an empty cell."""
    cats = field.cells.get(pos)
    if not cats:
        return 0.0
    return max(consensus_value(d, field.params) for d in cats.values())


def integrate_trace_into_memory(agent, pos: Position, cat: str, c: float, t: int) -> bool:
    """Fold a sensed trace into ``agent.memory`` weighted by consensus and social learning.

    The candidate strength is ``0.5 * c * beta`` for the agent's learning rate
    ``beta`` in that category. Candidates at or below the memory threshold are
    dropped without touching the store. Returns whether the store changed.
    """
    if c < 0:
        raise ValueError(f"consensus must be non-negative, got {c}")
    store = agent.memory
    if store is None:
        return False
    s = BASE_TRACE_STRENGTH * c * agent.traits.social_learning[cat]
    if s <= store.params.threshold:
        return False
    add_or_reinforce(store, MemoryEntry(pos, cat, t, min(MAX_STRENGTH, s)))
    return True


@lru_cache(maxsize=1 << 16)
def _window(w: int, h: int, torus: bool, center: Position, radius: int) -> tuple[Position, ...]:
    cx, cy = center
    if torus:
        return tuple(sorted(
            ((cx + dx) % w, (cy + dy) % h)
            for dx in range(-radius, radius + 1)
            for dy in range(-radius, radius + 1)
        ))
    return tuple(
        (x, y)
        for x in range(max(0, cx - radius), min(w, cx + radius + 1))
        for y in range(max(0, cy - radius), min(h, cy + radius + 1))
    )


def _cells_around(world, center: Position, radius: int) -> tuple[Position, ...]:
    """Cells within Chebyshev ``radius`` of ``center`` (inclusive) in lexicographic order."""
    return _window(world.width, world.height, world.torus, center, radius)


def sensed_traces(
    field: TraceField, world, center: Position, radius: int = 2, strongest_only: bool = False
) -> list[tuple[Position, str, float]]:
    """``(position, category, consensus)`` for traces within ``radius`` of ``center``.

    With ``strongest_only`` at most one reading per category is returned, the
    highest-consensus cell, ties going to the lexicographically first cell.
    """
    if strongest_only and field.grid is not None:
        axes = _axes(world.width, world.height, world.torus, center, radius)
        if axes is not None:
            return _strongest_on_grid(field.grid, *axes)
    cells = field.cells
    params = field.params
    found = []
    best: dict[str, tuple[Position, str, float]] = {}
    for q in _cells_around(world, center, radius):
        cats = cells.get(q)
        if not cats:
            continue
        for cat, deps in cats.items():
            c = consensus_value(deps, params)
            if not strongest_only:
                found.append((q, cat, c))
            elif cat not in best or c > best[cat][2]:
                best[cat] = (q, cat, c)
    if not strongest_only:
        return found
    return [best[c] for c in CATEGORIES if c in best]


@lru_cache(maxsize=1 << 16)
def _axes(w: int, h: int, torus: bool, center: Position, radius: int):
    """Sorted row and column indices of a window, or None if a torus window would overlap itself."""
    cx, cy = center
    if torus:
        if 2 * radius + 1 > min(w, h):
            return None
        xs = sorted((cx + d) % w for d in range(-radius, radius + 1))
        ys = sorted((cy + d) % h for d in range(-radius, radius + 1))
    else:
        xs = list(range(max(0, cx - radius), min(w, cx + radius + 1)))
        ys = list(range(max(0, cy - radius), min(h, cy + radius + 1)))
    return tuple(xs), tuple(ys), torus


def _strongest_on_grid(grid: np.ndarray, xs: tuple, ys: tuple, torus: bool) -> list[tuple[Position, str, float]]:
    if torus:
        sub = grid[:, list(xs)][:, :, list(ys)]
    else:
        sub = grid[:, xs[0] : xs[-1] + 1, ys[0] : ys[-1] + 1]
    flat = sub.reshape(len(CATEGORIES), -1)
    # argmax returns the first maximum in row-major order, i.e. the lexicographically first cell
    idx = flat.argmax(axis=1)
    vals = flat[np.arange(len(CATEGORIES)), idx]
    ny = len(ys)
    out = []
    for cat, k, c in zip(CATEGORIES, idx.tolist(), vals.tolist()):
        if c > 0:
            out.append(((xs[k // ny], ys[k % ny]), cat, c))
    return out
