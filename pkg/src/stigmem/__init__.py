"""Decentralized collective memory on a grid: agent memories, stigmergic traces and mean-field analysis."""

from stigmem.engine import ModelConfig, RunRecord, Simulation, build_configuration, run
from stigmem.world import World, WorldConfig, generate_world, neighbors

__version__ = "0.1.0"

__all__ = [
    "ModelConfig",
    "RunRecord",
    "Simulation",
    "World",
    "WorldConfig",
    "build_configuration",
    "generate_world",
    "neighbors",
    "run",
]
