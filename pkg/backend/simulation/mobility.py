"""Constant-speed random-direction mobility with boundary reflection."""

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from backend.simulation.radio_model import RadioModel, SectorConfig, strongest_sector
from backend.simulation.utils import ArrayLike, stream_rng

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class MobilityParams(BaseModel):
    """UE motion parameters (60 km/h for every UE)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    speed: float = Field(16.6667, gt=0)  # m/s
    heading_redraw_interval: float = Field(10.0, gt=0)  # s
    region_margin: float = Field(250.0, ge=0)  # m around the sites


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle UEs are confined to."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"Region must have positive width and height, got {self}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def contains(self, x: ArrayLike, y: ArrayLike) -> bool:
        """True if every given point lies inside the region (borders included)."""
        x = np.asarray(x)
        y = np.asarray(y)
        return bool(np.all((x >= self.x_min) & (x <= self.x_max) & (y >= self.y_min) & (y <= self.y_max)))


@dataclass(frozen=True)
class UeState:
    """Kinematic state and attachment of one UE."""

    ue_id: int
    position: Tuple[float, float]
    heading: float  # radians
    speed: float  # m/s
    serving_sector: int


def region_around_sites(sectors: Sequence[SectorConfig], margin: float = 250.0) -> Region:
    """Bounding rectangle of the sites, widened by `margin` meters on every side."""
    xy = np.array([s.site_position for s in sectors], dtype=float)
    return Region(
        x_min=float(xy[:, 0].min() - margin),
        y_min=float(xy[:, 1].min() - margin),
        x_max=float(xy[:, 0].max() + margin),
        y_max=float(xy[:, 1].max() + margin),
    )


def _fold(value: np.ndarray, low: float, width: float) -> Tuple[np.ndarray, np.ndarray]:
    """Fold coordinates back into [low, low + width] as repeated mirror reflections.

    Returns the folded coordinate and whether the direction along this axis is reversed.
    """
    u = np.mod(value - low, 2.0 * width)
    reversed_ = u > width
    return low + np.where(reversed_, 2.0 * width - u, u), reversed_


def reflect_advance(
    x: ArrayLike, y: ArrayLike, heading: ArrayLike, distance: ArrayLike, region: Region
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Move points along their headings, reflecting off the region walls.

    Angle of incidence equals angle of reflection; the remaining distance is
    travelled after each bounce.

    Returns:
        Tuple of (x, y, heading) arrays after the move
    """
    heading = np.asarray(heading, dtype=float)
    vx, vy = np.cos(heading), np.sin(heading)

    new_x, flip_x = _fold(np.asarray(x, dtype=float) + distance * vx, region.x_min, region.width)
    new_y, flip_y = _fold(np.asarray(y, dtype=float) + distance * vy, region.y_min, region.height)

    reflected = np.mod(np.arctan2(np.where(flip_y, -vy, vy), np.where(flip_x, -vx, vx)), TWO_PI)
    new_heading = np.where(flip_x | flip_y, reflected, heading)
    return new_x, new_y, new_heading


def init_ues(count: int, region: Region, seed: int, radio: RadioModel, speed: float = 16.6667) -> List[UeState]:
    """Place UEs uniformly in the region with uniform headings.

    Each UE draws from its own placement stream, so UE k starts in the same
    place whatever the UE count. Every UE attaches to its strongest-RSRP sector.

    Args:
        count: Number of UEs
        region: Region to place UEs in
        seed: Master seed
        radio: Radio model used for the initial attachment
        speed: UE speed in m/s

    Returns:
        UE states with ids 0..count-1
    """
    if count < 1:
        raise ValueError(f"UE count must be at least 1, got {count}")

    draws = []
    for ue_id in range(count):
        rng = stream_rng(seed, "placement", ue_id)
        draws.append(
            (
                rng.uniform(region.x_min, region.x_max),
                rng.uniform(region.y_min, region.y_max),
                rng.uniform(0.0, TWO_PI),
            )
        )
    draws = np.array(draws)
    serving = strongest_sector(radio.rsrp_matrix(draws[:, :2]))

    ues = [
        UeState(
            ue_id=ue_id,
            position=(float(draws[ue_id, 0]), float(draws[ue_id, 1])),
            heading=float(draws[ue_id, 2]),
            speed=speed,
            serving_sector=int(serving[ue_id]),
        )
        for ue_id in range(count)
    ]
    logger.info(f"Placed {count} UEs in region {region}")
    return ues


def step(ue: UeState, dt: float, region: Region) -> UeState:
    """Advance one UE by dt seconds at constant speed."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")

    x, y, heading = reflect_advance(ue.position[0], ue.position[1], ue.heading, ue.speed * dt, region)
    return replace(ue, position=(float(x), float(y)), heading=float(heading))


class MobilityModel:
    """Moves every UE of a run, redrawing headings on a fixed schedule."""

    def __init__(self, ues: Sequence[UeState], region: Region, params: MobilityParams, seed: int):
        """Initialize mobility model.

        Args:
            ues: Initial UE states (ids 0..n-1)
            region: Confinement region
            params: Mobility parameters
            seed: Master seed; each UE gets its own heading stream
        """
        self.region = region
        self.params = params
        self.ue_ids = np.array([ue.ue_id for ue in ues])
        self.x = np.array([ue.position[0] for ue in ues], dtype=float)
        self.y = np.array([ue.position[1] for ue in ues], dtype=float)
        self.heading = np.array([ue.heading for ue in ues], dtype=float)
        self.speed = np.array([ue.speed for ue in ues], dtype=float)
        self._rngs = [stream_rng(seed, "mobility", int(ue_id)) for ue_id in self.ue_ids]
        self.time = 0.0
        self._next_redraw = params.heading_redraw_interval

    @property
    def positions(self) -> np.ndarray:
        """Current positions, shape (ues, 2)."""
        return np.column_stack([self.x, self.y])

    def advance(self, dt: float) -> None:
        """Move all UEs by dt seconds, then redraw headings if the interval elapsed."""
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")

        self.x, self.y, self.heading = reflect_advance(self.x, self.y, self.heading, self.speed * dt, self.region)
        self.time += dt

        if self.time >= self._next_redraw - 1e-9:
            self.heading = np.array([rng.uniform(0.0, TWO_PI) for rng in self._rngs])
            self._next_redraw += self.params.heading_redraw_interval

    def states(self, serving: Sequence[int]) -> List[UeState]:
        """Snapshot of the UEs as UeState records."""
        return [
            UeState(
                ue_id=int(self.ue_ids[i]),
                position=(float(self.x[i]), float(self.y[i])),
                heading=float(self.heading[i]),
                speed=float(self.speed[i]),
                serving_sector=int(serving[i]),
            )
            for i in range(len(self.ue_ids))
        ]
