"""Downlink radio model: geometry, path loss, sector antenna gain, RSRP and SINR.

Angles follow the mathematical convention: degrees counter-clockwise from the
positive x axis (east). Azimuths and bearings use the same reference.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from backend.simulation.utils import ArrayLike, db_to_linear, linear_to_db, stream_rng, wrap_degrees

logger = logging.getLogger(__name__)

SECTORS_PER_SITE = 3
SECTOR_SPACING_DEG = 360.0 / SECTORS_PER_SITE


class PathLossParams(BaseModel):
    """Log-distance path loss with optional frozen log-normal shadowing."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    reference_loss: float = 34.5  # dB at reference_distance
    exponent: float = Field(3.5, gt=0)
    reference_distance: float = Field(1.0, gt=0)
    shadowing_stddev: float = Field(0.0, ge=0)
    # Thermal noise over 5 MHz (-107 dBm) plus 9 dB UE noise figure
    noise_floor: float = -98.0


class RadioParams(BaseModel):
    """Site layout and radio constants of the scenario."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tx_power: float = 46.0  # dBm per sector
    total_prbs: int = Field(25, ge=1)
    inter_site_distance: float = Field(500.0, gt=0)
    first_azimuth: float = Field(30.0, ge=0, lt=360)
    beamwidth: float = Field(65.0, gt=0)
    front_to_back: float = Field(20.0, ge=0)
    path_loss: PathLossParams = PathLossParams()

    @field_validator("tx_power")
    @classmethod
    def _finite_power(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("tx_power must be finite")
        return value


class SectorConfig(BaseModel):
    """One eNodeB sector."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    sector_id: int = Field(ge=0)
    site_position: Tuple[float, float]
    azimuth: float = Field(ge=0, lt=360)
    tx_power: float = 46.0
    total_prbs: int = Field(25, ge=1)

    @field_validator("tx_power")
    @classmethod
    def _finite_power(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("tx_power must be finite")
        return value


@dataclass(frozen=True)
class Measurement:
    """Per-UE measurement snapshot for one tick."""

    ue_id: int
    rsrp: np.ndarray  # dBm, indexed by sector_id
    serving_sinr: float
    timestamp: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.rsrp)):
            raise ValueError(f"Non-finite RSRP in measurement of UE {self.ue_id}")


def _as_output(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def build_sectors(
    inter_site_distance: float = 500.0,
    first_azimuth: float = 30.0,
    tx_power: float = 46.0,
    total_prbs: int = 25,
) -> List[SectorConfig]:
    """Lay out three equi-spaced sites with three sectors each.

    Sites sit on the corners of an equilateral triangle whose side is the
    inter-site distance. Sector ids are site-major (site 0 owns ids 0..2).

    Args:
        inter_site_distance: Distance between sites in meters
        first_azimuth: Azimuth of the first sector of every site in degrees
        tx_power: Transmit power per sector in dBm
        total_prbs: PRBs per sector

    Returns:
        List of nine SectorConfig objects ordered by sector_id
    """
    sites = [
        (0.0, 0.0),
        (inter_site_distance, 0.0),
        (inter_site_distance / 2.0, inter_site_distance * math.sqrt(3.0) / 2.0),
    ]
    sectors = []
    for site_index, position in enumerate(sites):
        for k in range(SECTORS_PER_SITE):
            sectors.append(
                SectorConfig(
                    sector_id=site_index * SECTORS_PER_SITE + k,
                    site_position=position,
                    azimuth=(first_azimuth + k * SECTOR_SPACING_DEG) % 360.0,
                    tx_power=tx_power,
                    total_prbs=total_prbs,
                )
            )
    return sectors


def validate_layout(sectors: Sequence[SectorConfig]) -> None:
    """Check sector ids are 0..n-1 and every site hosts three sectors 120 degrees apart."""
    ids = sorted(s.sector_id for s in sectors)
    if ids != list(range(len(sectors))):
        raise ValueError(f"Sector ids must be contiguous from 0, got {ids}")

    by_site: Dict[Tuple[float, float], List[float]] = {}
    for sector in sectors:
        by_site.setdefault(tuple(sector.site_position), []).append(sector.azimuth)

    for site, azimuths in by_site.items():
        if len(azimuths) != SECTORS_PER_SITE:
            raise ValueError(f"Site {site} has {len(azimuths)} sectors, expected {SECTORS_PER_SITE}")
        azimuths = sorted(azimuths)
        gaps = np.diff(azimuths + [azimuths[0] + 360.0])
        if not np.allclose(gaps, SECTOR_SPACING_DEG):
            raise ValueError(f"Sectors of site {site} are not {SECTOR_SPACING_DEG:.0f} degrees apart: {azimuths}")


def path_loss(distance: ArrayLike, params: PathLossParams, shadowing_sample: ArrayLike = 0.0) -> ArrayLike:
    """Log-distance path loss in dB.

    Distances below the reference distance are clamped to it.

    Args:
        distance: Distance(s) in meters
        params: Path loss parameters
        shadowing_sample: Shadowing term(s) in dB

    Returns:
        Path loss in dB (float for scalar input)
    """
    d = np.asarray(distance, dtype=float)
    if not np.all(np.isfinite(d)):
        raise ValueError(f"Distance must be finite, got {distance}")

    d = np.maximum(d, params.reference_distance)
    loss = params.reference_loss + 10.0 * params.exponent * np.log10(d / params.reference_distance)
    return _as_output(loss + np.asarray(shadowing_sample, dtype=float))


def antenna_gain(bearing_offset: ArrayLike, beamwidth: float = 65.0, front_to_back: float = 20.0) -> ArrayLike:
    """Parabolic horizontal sector pattern in dB (0 at boresight, floored at -front_to_back)."""
    offset = wrap_degrees(bearing_offset)
    gain = -np.minimum(12.0 * (offset / beamwidth) ** 2, front_to_back)
    return _as_output(gain)


def _received_power(
    site_xy: np.ndarray,
    azimuth: np.ndarray,
    tx_power: np.ndarray,
    ue_xy: np.ndarray,
    params: PathLossParams,
    shadowing: ArrayLike,
    beamwidth: float,
    front_to_back: float,
) -> np.ndarray:
    """Received power matrix (ue x sector) in dBm."""
    delta = ue_xy[:, np.newaxis, :] - site_xy[np.newaxis, :, :]
    distance = np.hypot(delta[..., 0], delta[..., 1])
    bearing = np.degrees(np.arctan2(delta[..., 1], delta[..., 0]))
    gain = antenna_gain(bearing - azimuth[np.newaxis, :], beamwidth, front_to_back)
    return tx_power[np.newaxis, :] + gain - path_loss(distance, params, shadowing)


def rsrp(
    sector: SectorConfig,
    ue_position: Tuple[float, float],
    params: PathLossParams,
    shadowing: float = 0.0,
    beamwidth: float = 65.0,
    front_to_back: float = 20.0,
) -> float:
    """RSRP of one sector at a UE position, in dBm.

    A UE co-located with the site is clamped to the reference distance.
    """
    power = _received_power(
        np.array([sector.site_position], dtype=float),
        np.array([sector.azimuth]),
        np.array([sector.tx_power]),
        np.array([ue_position], dtype=float),
        params,
        shadowing,
        beamwidth,
        front_to_back,
    )
    return float(power[0, 0])


def sinr_from_rsrp(rsrp_values: np.ndarray, serving: ArrayLike, noise_floor: float) -> ArrayLike:
    """Serving SINR in dB from per-sector received powers.

    Every non-serving sector is a co-channel interferer.

    Args:
        rsrp_values: RSRP in dBm, shape (sectors,) or (ues, sectors)
        serving: Serving sector index (or one index per UE)
        noise_floor: Noise power in dBm

    Returns:
        SINR in dB (float for a single UE)
    """
    matrix = np.atleast_2d(np.asarray(rsrp_values, dtype=float))
    serving_idx = np.atleast_1d(np.asarray(serving, dtype=int))
    rows = np.arange(matrix.shape[0])

    linear = db_to_linear(matrix)
    signal = linear[rows, serving_idx]
    interferers = np.ones_like(linear, dtype=bool)
    interferers[rows, serving_idx] = False
    interference = np.where(interferers, linear, 0.0).sum(axis=1)

    result = linear_to_db(signal / (interference + db_to_linear(noise_floor)))
    if np.ndim(rsrp_values) == 1:
        return float(result[0])
    return result


def sinr(
    serving: SectorConfig,
    all_sectors: Sequence[SectorConfig],
    ue_position: Tuple[float, float],
    params: PathLossParams,
    shadowing: Optional[Dict[int, float]] = None,
    beamwidth: float = 65.0,
    front_to_back: float = 20.0,
) -> float:
    """Downlink SINR in dB of a UE served by `serving`."""
    ids = [s.sector_id for s in all_sectors]
    if serving.sector_id not in ids:
        raise ValueError(f"Serving sector {serving.sector_id} is not part of the scenario")

    shadowing = shadowing or {}
    powers = np.array(
        [
            rsrp(s, ue_position, params, shadowing.get(s.sector_id, 0.0), beamwidth, front_to_back)
            for s in all_sectors
        ]
    )
    return sinr_from_rsrp(powers, ids.index(serving.sector_id), params.noise_floor)


def strongest_sector(rsrp_values: np.ndarray) -> ArrayLike:
    """Index of the strongest sector per UE; ties go to the lowest sector id."""
    best = np.argmax(np.asarray(rsrp_values), axis=-1)
    return int(best) if np.ndim(best) == 0 else best


class RadioModel:
    """Vectorized radio evaluation for every (UE, sector) pair of a run."""

    def __init__(self, sectors: Sequence[SectorConfig], params: RadioParams, num_ues: int, seed: int):
        """Initialize radio model.

        Args:
            sectors: Sector layout (ids 0..n-1)
            params: Radio parameters
            num_ues: Number of UEs in the run
            seed: Master seed; shadowing uses its own named stream
        """
        validate_layout(sectors)
        self.sectors = sorted(sectors, key=lambda s: s.sector_id)
        self.params = params
        self.site_xy = np.array([s.site_position for s in self.sectors], dtype=float)
        self.azimuth = np.array([s.azimuth for s in self.sectors], dtype=float)
        self.tx_power = np.array([s.tx_power for s in self.sectors], dtype=float)
        self.shadowing = self._frozen_shadowing(num_ues, seed)

        logger.info(
            f"Radio model ready: {len(self.sectors)} sectors, {num_ues} UEs, "
            f"shadowing stddev {params.path_loss.shadowing_stddev} dB"
        )

    @property
    def num_sectors(self) -> int:
        return len(self.sectors)

    def _frozen_shadowing(self, num_ues: int, seed: int) -> np.ndarray:
        stddev = self.params.path_loss.shadowing_stddev
        if stddev == 0:
            return np.zeros((num_ues, self.num_sectors))
        return np.vstack(
            [stream_rng(seed, "shadowing", ue_id).normal(0.0, stddev, self.num_sectors) for ue_id in range(num_ues)]
        )

    def rsrp_matrix(self, positions: np.ndarray) -> np.ndarray:
        """RSRP (ue x sector) in dBm for UE positions of shape (ues, 2)."""
        return _received_power(
            self.site_xy,
            self.azimuth,
            self.tx_power,
            np.asarray(positions, dtype=float),
            self.params.path_loss,
            self.shadowing,
            self.params.beamwidth,
            self.params.front_to_back,
        )

    def measure(self, positions: np.ndarray, serving: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """RSRP matrix and serving SINR for all UEs.

        Returns:
            Tuple of (rsrp matrix in dBm, serving SINR per UE in dB)
        """
        powers = self.rsrp_matrix(positions)
        return powers, sinr_from_rsrp(powers, serving, self.params.path_loss.noise_floor)

    @staticmethod
    def measurement(ue_id: int, rsrp_row: np.ndarray, serving_sinr: float, timestamp: float) -> Measurement:
        """Wrap one row of a measured tick as a Measurement record."""
        return Measurement(
            ue_id=ue_id,
            rsrp=np.array(rsrp_row, dtype=float),
            serving_sinr=float(serving_sinr),
            timestamp=timestamp,
        )
