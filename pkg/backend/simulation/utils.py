"""Numeric and random-stream utilities shared by the simulation modules."""

from typing import Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

# Named random streams. Ids are fixed so adding a stream never perturbs the others.
STREAM_IDS = {
    "placement": 0,
    "mobility": 1,
    "shadowing": 2,
}


def stream_rng(seed: int, stream: str, *key: int) -> np.random.Generator:
    """Build an independent generator for a named stream of the master seed.

    Args:
        seed: Master seed of the run
        stream: Stream name (see STREAM_IDS)
        *key: Optional sub-keys (e.g. a UE id) for per-entity streams

    Returns:
        Seeded numpy Generator
    """
    if stream not in STREAM_IDS:
        raise ValueError(f"Unknown random stream: {stream}")
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(STREAM_IDS[stream], *key))
    return np.random.default_rng(sequence)


def db_to_linear(value_db: ArrayLike) -> ArrayLike:
    """Convert dB (or dBm) to linear scale (or mW)."""
    return np.power(10.0, np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value: ArrayLike) -> ArrayLike:
    """Convert linear scale (or mW) to dB (or dBm)."""
    return 10.0 * np.log10(np.asarray(value, dtype=float))


def wrap_degrees(angle: ArrayLike) -> ArrayLike:
    """Normalize angles in degrees to (-180, 180]."""
    wrapped = np.mod(np.asarray(angle, dtype=float) + 180.0, 360.0) - 180.0
    return np.where(wrapped == -180.0, 180.0, wrapped)
