"""Synthetic property triples: two well-separated labeled instances and a
query built as a perturbation of the first, so its nearest match is known by
construction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NutsError

_MAX_RESAMPLES = 1000


class InvalidSpec(NutsError):
    pass


@dataclass(frozen=True)
class SyntheticSpec:
    n_props: int
    separation: float = 0.25  # minimum mean |A - B| between the base pair
    noise: float = 0.05       # stddev of the perturbation producing the query
    seed: int = 0

    def __post_init__(self):
        if self.n_props < 1:
            raise InvalidSpec("n_props must be >= 1")
        if not 0.0 < self.separation <= 1.0:
            raise InvalidSpec("separation must be in (0, 1]")
        if self.noise < 0.0:
            raise InvalidSpec("noise must be >= 0")


def gen_triple(spec: SyntheticSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(A, B, C) strength vectors in [0,1]^n: A, B i.i.d. uniform resampled
    until mean |A - B| >= separation; C = clamp(A + N(0, noise))."""
    rng = np.random.default_rng(spec.seed)
    for _ in range(_MAX_RESAMPLES):
        a = rng.uniform(size=spec.n_props)
        b = rng.uniform(size=spec.n_props)
        if np.abs(a - b).mean() >= spec.separation:
            break
    else:
        raise InvalidSpec(
            f"separation {spec.separation} not attainable for uniform vectors "
            f"of length {spec.n_props}")
    c = np.clip(a + rng.normal(0.0, spec.noise, size=spec.n_props), 0.0, 1.0)
    return a, b, c
