"""Toy detector geometry, all lengths in millimetres.

A 4x4 grid of identical towers (pitch 400, footprint 360x360). Each tower
has 10 tracker planes at z = 50..500, a calorimeter of 8 crystals in a
4x2 grid spanning z = -200..0, and one anti-coincidence tile over its
footprint at z = 550 (10 thick). Volumes are disjoint by construction.
"""

from __future__ import annotations

TOWER_GRID = 4
N_TOWERS = TOWER_GRID * TOWER_GRID
TOWER_PITCH = 400.0
TOWER_FOOTPRINT = 360.0
TOWER_Z = (0.0, 520.0)

N_PLANES = 10
PLANE_SPACING = 50.0
PLANE_ZS = tuple(PLANE_SPACING * (i + 1) for i in range(N_PLANES))  # 50..500

CAL_COLS = 4
CAL_ROWS = 2
CRYSTALS_PER_TOWER = CAL_COLS * CAL_ROWS
N_CRYSTALS = N_TOWERS * CRYSTALS_PER_TOWER
CAL_Z = (-200.0, 0.0)

ACD_Z = (550.0, 560.0)
N_TILES = N_TOWERS


def box_corners(x0, x1, y0, y1, z0, z1) -> tuple:
    """8 corners: bottom face counter-clockwise, then top face in the same order."""
    return (
        (x0, y0, z0),
        (x1, y0, z0),
        (x1, y1, z0),
        (x0, y1, z0),
        (x0, y0, z1),
        (x1, y0, z1),
        (x1, y1, z1),
        (x0, y1, z1),
    )


class DetectorModel:
    """Pure geometry queries; stateless and shareable."""

    plane_zs = PLANE_ZS

    def tower_center(self, tower: int) -> tuple:
        col = tower % TOWER_GRID
        row = tower // TOWER_GRID
        offset = TOWER_PITCH * (TOWER_GRID - 1) / 2.0  # 600 for a 4x4 grid
        return (-offset + TOWER_PITCH * col, -offset + TOWER_PITCH * row)

    def tower_bounds(self, tower: int) -> tuple:
        cx, cy = self.tower_center(tower)
        half = TOWER_FOOTPRINT / 2.0
        return (cx - half, cx + half, cy - half, cy + half)

    def tower_box(self, tower: int) -> tuple:
        x0, x1, y0, y1 = self.tower_bounds(tower)
        return box_corners(x0, x1, y0, y1, TOWER_Z[0], TOWER_Z[1])

    def crystal_bounds(self, crystal_id: int) -> tuple:
        tower, index = divmod(crystal_id, CRYSTALS_PER_TOWER)
        row, col = divmod(index, CAL_COLS)
        x0, x1, y0, y1 = self.tower_bounds(tower)
        dx = (x1 - x0) / CAL_COLS
        dy = (y1 - y0) / CAL_ROWS
        return (x0 + col * dx, x0 + (col + 1) * dx, y0 + row * dy, y0 + (row + 1) * dy)

    def crystal_box(self, crystal_id: int) -> tuple:
        x0, x1, y0, y1 = self.crystal_bounds(crystal_id)
        return box_corners(x0, x1, y0, y1, CAL_Z[0], CAL_Z[1])

    def crystal_id(self, tower: int, col: int, row: int) -> int:
        return tower * CRYSTALS_PER_TOWER + row * CAL_COLS + col

    def crystal_grid_position(self, tower: int, x: float, y: float) -> tuple:
        """Continuous (u, v) cell coordinates of (x, y) in the tower's crystal grid."""
        x0, x1, y0, y1 = self.tower_bounds(tower)
        u = (x - x0) / ((x1 - x0) / CAL_COLS)
        v = (y - y0) / ((y1 - y0) / CAL_ROWS)
        return u, v

    def tile_box(self, tower: int) -> tuple:
        x0, x1, y0, y1 = self.tower_bounds(tower)
        return box_corners(x0, x1, y0, y1, ACD_Z[0], ACD_Z[1])

    def tile_quad(self, tower: int) -> tuple:
        """The 4 corners of the tile face a rising track crosses."""
        x0, x1, y0, y1 = self.tower_bounds(tower)
        z = ACD_Z[0]
        return ((x0, y0, z), (x1, y0, z), (x1, y1, z), (x0, y1, z))

    def bounding_box(self) -> tuple:
        offset = TOWER_PITCH * (TOWER_GRID - 1) / 2.0 + TOWER_FOOTPRINT / 2.0
        return ((-offset, offset), (-offset, offset), (CAL_Z[0], ACD_Z[1]))

    def contains(self, x: float, y: float, z: float) -> bool:
        (x0, x1), (y0, y1), (z0, z1) = self.bounding_box()
        return x0 <= x <= x1 and y0 <= y <= y1 and z0 <= z <= z1
