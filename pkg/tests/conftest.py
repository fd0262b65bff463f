from __future__ import annotations

import pytest

from stigmem import build_configuration, generate_world
from stigmem.world import WorldConfig

# Filled by tests/test_acceptance.py: criterion number -> (passed, detail)
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def world15():
    return generate_world(WorldConfig(), seed=3)


@pytest.fixture
def open_world():
    """A 9x9 bounded world with no sites at all."""
    cfg = WorldConfig(width=9, height=9, food_fraction=0, obstacle_fraction=0, danger_fraction=0)
    return generate_world(cfg, seed=0)


@pytest.fixture
def small_config():
    return build_configuration("full_memory", steps=20, seed=11)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
