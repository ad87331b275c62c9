import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from camnav.world import Scene


def make_room(width_cells=50, height_cells=50, goals=(), walls=()):
    """Empty sealed room with optional (iy0, iy1, ix0, ix1) wall blocks."""
    occ = np.zeros((height_cells, width_cells), dtype=bool)
    occ[0, :] = occ[-1, :] = True
    occ[:, 0] = occ[:, -1] = True
    for iy0, iy1, ix0, ix1 in walls:
        occ[iy0:iy1, ix0:ix1] = True
    return Scene(occupied=occ, goal_positions=[tuple(g) for g in goals])


@pytest.fixture
def open_room():
    return make_room()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
