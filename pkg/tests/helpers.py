"""Builders shared across test modules."""

import numpy as np

from evtbr.bench import random_stream  # noqa: F401  (re-exported for tests)
from evtbr.events import EVENT_DTYPE, BinarySliceStack, EventStream, SensorGeometry


def make_stream(geometry: SensorGeometry, rows) -> EventStream:
    """Stream from (t, x, y, p) tuples, order preserved."""
    arr = np.array(rows, dtype=EVENT_DTYPE) if len(rows) else np.empty(0, dtype=EVENT_DTYPE)
    return EventStream(geometry, arr)


def random_stack(
    geometry: SensorGeometry, n_bits: int, seed: int, density: float = 0.5
) -> BinarySliceStack:
    rng = np.random.default_rng(seed)
    slices = rng.random((n_bits, geometry.height, geometry.width)) < density
    return BinarySliceStack(geometry, slices)
