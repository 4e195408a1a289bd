"""Seeded dense random projection from 8000 dims to D, strength calibration,
and the index-subsampling baseline.

The projection matrix is never serialized: (seed, out_dim) regenerate it
bit-exactly. Entries are i.i.d. Gaussian with standard deviation 1/sqrt(D),
which keeps projected magnitudes comparable across D.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NutsError

INPUT_DIM = 8000

#: Generator behind every seeded draw in this module (numpy's default_rng).
#: Part of the reproducibility contract, echoed by the harness config output.
PRNG_NAME = "pcg64"


class InvalidDim(NutsError):
    """Requested output dimension outside [1, 8000]."""


class DimMismatch(NutsError):
    """Vector shape does not fit the matrix or calibration."""


class EmptyCalibration(NutsError):
    """Calibration needs at least one reference vector."""


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    entries: np.ndarray  # (8000, out_dim)
    seed: int
    out_dim: int


def generate_projection(seed: int, out_dim: int) -> ProjectionMatrix:
    """Dense 8000 x D matrix with N(0, 1/D) entries, reproducible from seed."""
    if not 1 <= out_dim <= INPUT_DIM:
        raise InvalidDim(f"out_dim must be in [1, {INPUT_DIM}], got {out_dim}")
    rng = np.random.default_rng(seed)
    entries = rng.normal(0.0, 1.0 / np.sqrt(out_dim), size=(INPUT_DIM, out_dim))
    return ProjectionMatrix(entries, int(seed), out_dim)


def project(vec: np.ndarray, m: ProjectionMatrix) -> np.ndarray:
    """Matrix-vector product; the reduced vector is row-space of the input."""
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (INPUT_DIM,):
        raise DimMismatch(f"expected shape ({INPUT_DIM},), got {vec.shape}")
    return vec @ m.entries


@dataclass(frozen=True, eq=False)
class Calibration:
    """Per-dimension (min, max) over a reference set, usually the training
    examples of one trial."""

    lo: np.ndarray
    hi: np.ndarray


def calibrate(vectors) -> Calibration:
    """Per-dimension min/max over the given reduced vectors."""
    arr = np.asarray(list(vectors), dtype=float)
    if arr.size == 0:
        raise EmptyCalibration("need at least one vector")
    if arr.ndim != 2:
        raise DimMismatch("vectors must share one dimensionality")
    return Calibration(arr.min(axis=0), arr.max(axis=0))


def to_unit_interval(r: np.ndarray, c: Calibration) -> np.ndarray:
    """Scale per dimension to [0, 1], clamping values beyond the calibration
    range; a degenerate dimension (max == min) maps to neutral 0.5."""
    r = np.asarray(r, dtype=float)
    if r.shape != c.lo.shape:
        raise DimMismatch(f"expected shape {c.lo.shape}, got {r.shape}")
    span = c.hi - c.lo
    out = np.full_like(r, 0.5)
    live = span > 0
    out[live] = np.clip((r[live] - c.lo[live]) / span[live], 0.0, 1.0)
    return out


def subsample_indices(seed: int, out_dim: int) -> np.ndarray:
    """D distinct feature indices drawn uniformly without replacement."""
    if not 1 <= out_dim <= INPUT_DIM:
        raise InvalidDim(f"out_dim must be in [1, {INPUT_DIM}], got {out_dim}")
    rng = np.random.default_rng(seed)
    return rng.choice(INPUT_DIM, size=out_dim, replace=False)


def subsample(vec: np.ndarray, out_dim: int, seed: int) -> np.ndarray:
    """Baseline reduction: copy D seeded-random entries of the feature vector."""
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (INPUT_DIM,):
        raise DimMismatch(f"expected shape ({INPUT_DIM},), got {vec.shape}")
    return vec[subsample_indices(seed, out_dim)]
