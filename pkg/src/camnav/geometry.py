"""Planar angle and grid-cell helpers shared across the package.

Headings are degrees, counterclockwise, with 0 pointing along +x.
All actor headings live on the 30-degree lattice; probe directions add
45-degree multiples, so every heading the simulator produces is a
multiple of 15 degrees and uses an exact trig table (cardinal directions
come out as exact 0.0 / +-1.0, which keeps map transforms crisp).
"""

import math

RESOLUTION = 0.08  # meters per grid cell

_LATTICE_STEP = 15
_CELL_EPS = 1e-9  # guards floor() against coordinates that are exact cell edges

def _snap(v: float) -> float:
    for exact in (0.0, 0.5, 1.0):
        if abs(v - exact) < 1e-12:
            return exact
    return v


# First quadrant measured once, the rest derived by reflection so opposite
# headings negate bitwise.
_Q_COS = {k: _snap(math.cos(math.radians(k))) for k in range(0, 91, _LATTICE_STEP)}
_Q_SIN = {k: _snap(math.sin(math.radians(k))) for k in range(0, 91, _LATTICE_STEP)}

_COS = {}
_SIN = {}
for _k in range(0, 360, _LATTICE_STEP):
    if _k <= 90:
        _COS[_k], _SIN[_k] = _Q_COS[_k], _Q_SIN[_k]
    elif _k <= 180:
        _COS[_k], _SIN[_k] = -_Q_COS[180 - _k], _Q_SIN[180 - _k]
    elif _k < 270:
        _COS[_k], _SIN[_k] = -_Q_COS[_k - 180], -_Q_SIN[_k - 180]
    else:
        _COS[_k], _SIN[_k] = _Q_COS[360 - _k], -_Q_SIN[360 - _k]


def normalize_deg(angle: float) -> float:
    """Map an angle to [0, 360)."""
    return angle % 360.0


def wrap180(angle: float) -> float:
    """Map an angle to (-180, 180]."""
    r = angle % 360.0
    if r > 180.0:
        r -= 360.0
    return r


def ang_dist(a: float, b: float) -> float:
    """Absolute angular distance in [0, 180]."""
    return abs(wrap180(a - b))


def left_turn(frm: float, to: float) -> float:
    """Counterclockwise rotation in [0, 360) taking heading `frm` to `to`."""
    return (to - frm) % 360.0


def heading_vec(deg: float) -> tuple[float, float]:
    """Unit vector of a heading; exact on the 15-degree lattice."""
    k = deg % 360.0
    ik = int(k)
    if k == ik and ik % _LATTICE_STEP == 0:
        return _COS[ik], _SIN[ik]
    r = math.radians(k)
    return math.cos(r), math.sin(r)


def cell_of(coord: float, res: float = RESOLUTION) -> int:
    """Grid index containing a world coordinate."""
    return int(math.floor(coord / res + _CELL_EPS))


def cell_center(index: int, res: float = RESOLUTION) -> float:
    return (index + 0.5) * res


def euclid(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])
