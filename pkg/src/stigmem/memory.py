"""Per-agent memory store with four categories, decay, reinforcement and eviction."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

Position = tuple[int, int]

CATEGORIES = ("food", "danger", "social", "exploration")

DECAY = {"food": 0.985, "danger": 0.998, "social": 0.95, "exploration": 0.97}
MAX_AGE = {"food": 80, "danger": 100, "social": 40, "exploration": 60}
STRENGTH_THRESHOLD = 0.2
MAX_STRENGTH = 1.0
REINFORCEMENT_GAIN = 0.2
DEFAULT_CAPACITY = 50

# Attraction (+) or repulsion (-) of each category in the spatial score.
SCORE_SIGN = {"food": 1.0, "exploration": 0.3, "social": 0.2, "danger": -1.0}
SCORE_RADIUS = 2


@dataclass(frozen=True)
class CategoryParams:
    decay: dict[str, float] = field(default_factory=lambda: dict(DECAY))
    max_age: dict[str, int] = field(default_factory=lambda: dict(MAX_AGE))
    threshold: float = STRENGTH_THRESHOLD

    def __post_init__(self) -> None:
        if set(self.decay) != set(CATEGORIES) or set(self.max_age) != set(CATEGORIES):
            raise ValueError("decay and max_age must cover exactly the four categories")
        for cat, d in self.decay.items():
            if not 0.0 < d < 1.0:
                raise ValueError(f"decay for {cat} must lie in (0, 1), got {d}")

    def with_decay(self, category: str, value: float) -> CategoryParams:
        return replace(self, decay={**self.decay, category: value})


@dataclass(slots=True)
class MemoryEntry:
    position: Position
    category: str
    created_at: int
    strength: float
    reinforcements: int = 0
    # set once the owner stands on the position after the entry was created
    used: bool = False

    def age(self, now: int) -> int:
        return now - self.created_at


class MemoryStore:
    """Bounded memory across the four categories.

    Entries are keyed by ``(category, position)``, so a repeated experience
    reinforces the existing entry rather than duplicating it.
    """

    def __init__(self, capacity: int = DEFAULT_CAPACITY, params: CategoryParams | None = None):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.params = params or CategoryParams()
        self.entries: dict[str, dict[Position, MemoryEntry]] = {c: {} for c in CATEGORIES}

    def __len__(self) -> int:
        return sum(map(len, self.entries.values()))

    def __iter__(self) -> Iterator[MemoryEntry]:
        for cat in CATEGORIES:
            yield from self.entries[cat].values()

    def get(self, category: str, position: Position) -> MemoryEntry | None:
        return self.entries[category].get(position)

    def positions(self) -> set[Position]:
        out: set[Position] = set()
        for cat in CATEGORIES:
            out.update(self.entries[cat])
        return out


def decay_memories(store: MemoryStore, dt: int = 1) -> MemoryStore:
    """Multiply every strength by its category rate raised to ``dt``. No removals."""
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    if dt == 0:
        return store
    for cat, bucket in store.entries.items():
        factor = store.params.decay[cat] ** dt
        for entry in bucket.values():
            entry.strength *= factor
    return store


def _eviction_key(entry: MemoryEntry) -> tuple:
    return (entry.strength, entry.created_at, entry.position)


def add_or_reinforce(
    store: MemoryStore, candidate: MemoryEntry, eta: float = REINFORCEMENT_GAIN
) -> MemoryStore:
    """Insert ``candidate`` or reinforce the entry already held at its (position, category).

    Reinforcement multiplies strength by ``1 + eta`` (capped at 1.0), bumps the
    reinforcement count and refreshes ``created_at`` to the candidate's time.
    When the store overflows, the weakest entry goes first; ties fall to the
    oldest, then to the lexicographically smallest position.
    """
    if not candidate.strength > 0:
        raise ValueError(f"memory strength must be positive, got {candidate.strength}")
    if candidate.category not in store.entries:
        raise ValueError(f"unknown memory category {candidate.category!r}")
    bucket = store.entries[candidate.category]
    existing = bucket.get(candidate.position)
    if existing is not None:
        existing.strength = min(MAX_STRENGTH, existing.strength * (1.0 + eta))
        existing.reinforcements += 1
        existing.created_at = candidate.created_at
        return store

    c = candidate
    bucket[c.position] = MemoryEntry(
        c.position, c.category, c.created_at, min(MAX_STRENGTH, c.strength), c.reinforcements, c.used
    )
    if len(store) > store.capacity:
        weakest = min(store, key=_eviction_key)
        del store.entries[weakest.category][weakest.position]
    return store


def prune(store: MemoryStore, now: int) -> MemoryStore:
    """Drop entries at or below the strength threshold or older than their category limit."""
    thresh = store.params.threshold
    for cat, bucket in store.entries.items():
        limit = store.params.max_age[cat]
        dead = [p for p, e in bucket.items() if e.strength <= thresh or now - e.created_at > limit]
        for p in dead:
            del bucket[p]
    return store


def decay_and_prune(store: MemoryStore, now: int) -> MemoryStore:
    """One step of :func:`decay_memories` followed by :func:`prune`, in a single pass."""
    params = store.params
    thresh = params.threshold
    for cat, bucket in store.entries.items():
        rate = params.decay[cat]
        oldest = now - params.max_age[cat]
        dead = []
        for p, entry in bucket.items():
            entry.strength *= rate
            if entry.strength <= thresh or entry.created_at < oldest:
                dead.append(p)
        for p in dead:
            del bucket[p]
    return store


def memory_score(store: MemoryStore, pos: Position, now: int = 0, signs: dict[str, float] = SCORE_SIGN) -> float:
    """Signed, proximity-weighted sum of memories within Chebyshev distance 2 of ``pos``.

    Each entry contributes ``sign(category) * strength / (1 + distance)``.
    """
    px, py = pos
    total = 0.0
    for cat in CATEGORIES:
        sign = signs[cat]
        if not sign:
            continue
        for (x, y), entry in store.entries[cat].items():
            d = max(abs(x - px), abs(y - py))
            if d <= SCORE_RADIUS:
                total += sign * entry.strength / (1 + d)
    return total


def memory_scores(
    store: MemoryStore, candidates: list[Position], center: Position, signs: dict[str, float] = SCORE_SIGN
) -> list[float]:
    """``memory_score`` for several candidates around ``center`` in one pass.

    Only entries within ``SCORE_RADIUS + 1`` of ``center`` can reach a Moore-1
    candidate, so the rest are skipped up front.
    """
    cx, cy = center
    reach = SCORE_RADIUS + 1
    near = []
    for cat in CATEGORIES:
        sign = signs[cat]
        if not sign:
            continue
        for (x, y), entry in store.entries[cat].items():
            if abs(x - cx) <= reach and abs(y - cy) <= reach:
                near.append((x, y, sign * entry.strength))
    if not near:
        return [0.0] * len(candidates)
    out = []
    for px, py in candidates:
        total = 0.0
        for x, y, w in near:
            d = max(abs(x - px), abs(y - py))
            if d <= SCORE_RADIUS:
                total += w / (1 + d)
        out.append(total)
    return out
