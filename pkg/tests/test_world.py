from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stigmem.world import (
    ConfigError,
    World,
    WorldConfig,
    disjoint,
    generate_world,
    neighbors,
    sample_spawns,
    site_count,
)


class TestWorldConfig:
    def test_defaults_sit_in_reference_ranges(self):
        assert WorldConfig().in_reference_ranges()

    @pytest.mark.parametrize("size", [0, 4])
    def test_too_small_grid_rejected(self, size):
        with pytest.raises(ConfigError):
            WorldConfig(width=size, height=size)

    def test_fraction_overflow_rejected(self):
        with pytest.raises(ConfigError):
            WorldConfig(food_fraction=0.5, obstacle_fraction=0.3, danger_fraction=0.2)

    def test_unknown_topology_rejected(self):
        with pytest.raises(ConfigError):
            WorldConfig(topology="sphere")


class TestGenerateWorld:
    def test_food_count_on_20x20(self):
        w = generate_world(WorldConfig(width=20, height=20, food_fraction=0.125), seed=7)
        assert len(w.food_sites) == round(0.125 * 400) == 50

    def test_all_zero_fractions_give_empty_sites(self):
        cfg = WorldConfig(food_fraction=0, obstacle_fraction=0, danger_fraction=0)
        w = generate_world(cfg, seed=1)
        assert not w.food_sites and not w.obstacle_sites and not w.danger_sites

    @pytest.mark.parametrize("fraction", [0.10, 0.125, 0.15])
    def test_reference_food_range_on_15x15(self, fraction):
        w = generate_world(WorldConfig(food_fraction=fraction), seed=2)
        assert 22 <= len(w.food_sites) <= 34

    def test_site_counts_round_fraction_times_cells(self):
        cfg = WorldConfig(width=15, height=15)
        w = generate_world(cfg, seed=5)
        # 0.065 * 225 = 14.625 and 0.04 * 225 = 9.0
        assert (len(w.food_sites), len(w.obstacle_sites), len(w.danger_sites)) == (28, 15, 9)

    def test_half_rounds_up(self):
        assert site_count(0.1, 225) == 23  # 22.5

    def test_danger_damage_in_range(self, world15):
        assert all(5 <= d <= 15 for d in world15.danger_sites.values())

    def test_same_seed_same_world(self):
        assert generate_world(WorldConfig(), 9) == generate_world(WorldConfig(), 9)

    def test_different_seed_different_world(self):
        assert generate_world(WorldConfig(), 9).food_sites != generate_world(WorldConfig(), 10).food_sites

    def test_json_round_trip(self, world15):
        again = World.from_dict(json.loads(world15.to_json()))
        assert again == world15
        assert again.danger_sites == world15.danger_sites

    def test_cell_view(self, world15):
        pos = next(iter(sorted(world15.danger_sites)))
        cell = world15.cell(*pos)
        assert cell.danger_damage == world15.danger_sites[pos] and not cell.food and not cell.obstacle
        with pytest.raises(IndexError):
            world15.cell(15, 0)


@settings(max_examples=40, deadline=None)
@given(
    size=st.integers(5, 25),
    food=st.floats(0, 0.3),
    obstacle=st.floats(0, 0.3),
    danger=st.floats(0, 0.3),
    seed=st.integers(0, 2**32 - 1),
)
def test_sites_pairwise_disjoint(size, food, obstacle, danger, seed):
    cfg = WorldConfig(width=size, height=size, food_fraction=food, obstacle_fraction=obstacle, danger_fraction=danger)
    w = generate_world(cfg, seed)
    assert disjoint([set(w.food_sites), set(w.obstacle_sites), set(w.danger_sites)])
    assert len(w.food_sites) == site_count(food, size * size)


class TestNeighbors:
    def test_interior_radius_one(self, open_world):
        assert len(neighbors(open_world, (4, 4), 1)) == 8

    def test_corner_radius_one(self, open_world):
        assert neighbors(open_world, (0, 0), 1) == [(0, 1), (1, 0), (1, 1)]

    def test_interior_radius_two(self, open_world):
        assert len(neighbors(open_world, (4, 4), 2)) == 24

    def test_lexicographic_and_excludes_center(self, open_world):
        out = neighbors(open_world, (3, 5), 2)
        assert out == sorted(out)
        assert (3, 5) not in out

    def test_obstacles_are_included(self, world15):
        obs = next(iter(world15.obstacle_sites))
        around = [p for p in neighbors(world15, obs, 1)]
        assert any(obs in neighbors(world15, q, 1) for q in around)

    def test_outside_grid_rejected(self, open_world):
        with pytest.raises(IndexError):
            neighbors(open_world, (9, 0), 1)

    def test_radius_zero_rejected(self, open_world):
        with pytest.raises(ValueError):
            neighbors(open_world, (1, 1), 0)

    def test_result_is_a_fresh_list(self, open_world):
        a = neighbors(open_world, (4, 4), 1)
        a.clear()
        assert len(neighbors(open_world, (4, 4), 1)) == 8


@settings(max_examples=60, deadline=None)
@given(size=st.integers(5, 12), x=st.integers(0, 11), y=st.integers(0, 11), r=st.integers(1, 3))
def test_neighbors_match_brute_force(size, x, y, r):
    x, y = x % size, y % size
    cfg = WorldConfig(width=size, height=size, food_fraction=0, obstacle_fraction=0, danger_fraction=0)
    bounded = generate_world(cfg, 0)
    expected = sorted(
        (i, j) for i in range(size) for j in range(size) if max(abs(i - x), abs(j - y)) <= r and (i, j) != (x, y)
    )
    assert neighbors(bounded, (x, y), r) == expected
    torus = generate_world(WorldConfig(width=size, height=size, food_fraction=0, obstacle_fraction=0,
                                       danger_fraction=0, topology="torus"), 0)
    assert len(neighbors(torus, (x, y), r)) == (2 * r + 1) ** 2 - 1
    assert all(torus.contains(p) for p in neighbors(torus, (x, y), r))


class TestSpawns:
    def test_spawns_avoid_every_site(self, world15):
        taken = world15.food_sites | world15.obstacle_sites | world15.danger_sites.keys()
        assert not set(sample_spawns(world15, 30, seed=4)) & taken

    def test_spawns_unique_when_room(self, world15):
        spawns = sample_spawns(world15, 20, seed=4)
        assert len(set(spawns)) == 20

    def test_spawns_independent_of_count_prefix_stream(self, world15):
        assert sample_spawns(world15, 5, seed=4) == sample_spawns(world15, 5, seed=4)

    def test_zero_agents(self, world15):
        assert sample_spawns(world15, 0, seed=1) == []
