"""Cell layouts and BS-to-user distances.

All lengths are normalized to the cell radius ``r`` (``r = 1`` in the
presets).  Base-station antenna height enters as a third coordinate, so every
distance is ``sqrt(planar**2 + h**2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

DEFAULT_HEIGHT = 0.05
DEFAULT_RADIUS = 1.0


def _as_points(points, name: str) -> np.ndarray:
    arr = np.array(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GeometryError(f"{name} must be a list of 2-D points, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class CellLayout:
    """Positions of the B base stations, their cell-center users and the cell-edge user.

    ``ccu_positions[j]`` is the user served by ``bs_positions[j]``.
    """

    bs_positions: np.ndarray
    ccu_positions: np.ndarray
    ceu_position: np.ndarray
    bs_height: float = DEFAULT_HEIGHT
    cell_radius: float = DEFAULT_RADIUS

    def __post_init__(self):
        bs = _as_points(self.bs_positions, "bs_positions")
        ccu = _as_points(self.ccu_positions, "ccu_positions")
        ceu = np.array(self.ceu_position, dtype=float).reshape(-1)
        if ceu.shape != (2,):
            raise GeometryError("ceu_position must be a single 2-D point")
        object.__setattr__(self, "bs_positions", bs)
        object.__setattr__(self, "ccu_positions", ccu)
        object.__setattr__(self, "ceu_position", ceu)
        object.__setattr__(self, "bs_height", float(self.bs_height))
        object.__setattr__(self, "cell_radius", float(self.cell_radius))

        n_bs = len(bs)
        if n_bs < 2:
            raise GeometryError(f"need at least 2 base stations, got {n_bs}")
        if len(ccu) != n_bs:
            raise GeometryError(
                f"one CCU per BS required: {n_bs} BSs but {len(ccu)} CCUs"
            )
        if self.bs_height < 0:
            raise GeometryError("bs_height must be >= 0")
        if self.cell_radius <= 0:
            raise GeometryError("cell_radius must be > 0")

        sep = np.linalg.norm(bs[:, None, :] - bs[None, :, :], axis=-1)
        off_diag = sep[~np.eye(n_bs, dtype=bool)]
        if np.any(off_diag <= 0):
            raise GeometryError("base stations must be at distinct positions")
        users = np.vstack([ccu, ceu[None, :]])
        planar = np.linalg.norm(bs[:, None, :] - users[None, :, :], axis=-1)
        if np.any(planar <= 0):
            raise GeometryError("a user coincides with a base-station position")

    @property
    def n_bs(self) -> int:
        return len(self.bs_positions)

    def reflected(self) -> "CellLayout":
        """Mirror image across the x axis (the BS1-BS2 axis in the presets)."""
        flip = np.array([1.0, -1.0])
        return CellLayout(
            self.bs_positions * flip,
            self.ccu_positions * flip,
            self.ceu_position * flip,
            self.bs_height,
            self.cell_radius,
        )

    def scaled(self, factor: float) -> "CellLayout":
        return CellLayout(
            self.bs_positions * factor,
            self.ccu_positions * factor,
            self.ceu_position * factor,
            self.bs_height * factor,
            self.cell_radius * factor,
        )


@dataclass(frozen=True)
class DistanceTable:
    """3-D distances; ``d_ccu[i, j]`` is BS-i to CCU-j, ``d_ceu[i]`` is BS-i to the CEU."""

    d_ccu: np.ndarray
    d_ceu: np.ndarray

    @property
    def n_bs(self) -> int:
        return len(self.d_ceu)


def preset_b2(radius: float = DEFAULT_RADIUS, height: float = DEFAULT_HEIGHT) -> CellLayout:
    """Two collinear cells: BS-1 at the origin, BS-2 at ``2r`` on the x axis.

    CCU-1 sits 0.45 from BS-1, CCU-2 sits 0.5 from BS-2 (towards BS-1) and the
    CEU sits 0.9 from BS-1, all on the line joining the two base stations.
    """
    r = radius
    bs = [(0.0, 0.0), (2 * r, 0.0)]
    ccu = [(0.45 * r, 0.0), (2 * r - 0.5 * r, 0.0)]
    ceu = (0.9 * r, 0.0)
    return CellLayout(bs, ccu, ceu, height, r)


def preset_b3(radius: float = DEFAULT_RADIUS, height: float = DEFAULT_HEIGHT) -> CellLayout:
    """Three base stations on an equilateral triangle of side ``2r``.

    The CEU lies on the BS-1/BS-2 edge, 0.9 from BS-1.  CCU-j lies on the
    segment from BS-j to the CEU, at 0.45, 0.5 and 0.55 from its base station.
    """
    r = radius
    bs = np.array([(0.0, 0.0), (2 * r, 0.0), (r, np.sqrt(3.0) * r)])
    ceu = np.array([0.9 * r, 0.0])
    own = np.array([0.45, 0.5, 0.55]) * r
    ccu = []
    for j in range(3):
        direction = ceu - bs[j]
        ccu.append(bs[j] + own[j] * direction / np.linalg.norm(direction))
    return CellLayout(bs, np.array(ccu), ceu, height, r)


PRESETS = {"b2": preset_b2, "b3": preset_b3}


def layout_from_preset(name: str) -> CellLayout:
    try:
        return PRESETS[name]()
    except KeyError:
        raise GeometryError(f"unknown layout preset {name!r}; expected one of {sorted(PRESETS)}") from None


def distances(layout: CellLayout) -> DistanceTable:
    """Distances from every BS antenna to every user, including antenna height."""
    bs = layout.bs_positions
    h2 = layout.bs_height**2
    planar_ccu = np.linalg.norm(bs[:, None, :] - layout.ccu_positions[None, :, :], axis=-1)
    planar_ceu = np.linalg.norm(bs - layout.ceu_position, axis=-1)
    d_ccu = np.sqrt(planar_ccu**2 + h2)
    d_ceu = np.sqrt(planar_ceu**2 + h2)
    if np.any(d_ccu <= 0) or np.any(d_ceu <= 0):
        raise GeometryError("zero BS-user distance (coincident positions with h = 0)")
    return DistanceTable(d_ccu, d_ceu)
