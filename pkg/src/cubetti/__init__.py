"""Betti numbers of cubical bodies via a discrete Morse sweep."""

from .grid import ShapeSpec, VoxelGrid, generate, load_grid, save_grid
from .morse import BettiReport, ForbiddenVertexError, analyze
from .oracle import betti_bruteforce

__all__ = [
    "BettiReport",
    "ForbiddenVertexError",
    "ShapeSpec",
    "VoxelGrid",
    "analyze",
    "betti_bruteforce",
    "generate",
    "load_grid",
    "save_grid",
]

__version__ = "0.1.0"
