"""Seeded random coefficient ensembles for tests and the CLI."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..coefficients import (
    VerblunskySequence,
    contractive,
    unitary,
)

MAX_RADIUS = 1.0 - 1e-8


class Distribution(Enum):
    UNIFORM_DISK = "uniform-disk"
    FIXED_RADIUS = "fixed-radius"


@dataclass(frozen=True)
class EnsembleSpec:
    """What to sample: block size, window, seed, and radius law.

    UNIFORM_DISK draws each coefficient with operator norm radius_max
    times the square root of a uniform variate (area-uniform in the
    scalar case); FIXED_RADIUS pins every norm to radius_max exactly.
    """

    m: int
    k_min: int
    k_max: int
    seed: int
    radius_max: float = 0.9
    distribution: Distribution = Distribution.UNIFORM_DISK

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("block size m must be at least 1")
        if self.k_max - self.k_min < 4:
            raise ValueError("window must span at least 4 sites")
        if not 0.0 < self.radius_max <= MAX_RADIUS:
            raise ValueError(f"radius_max must lie in (0, {MAX_RADIUS}]")


def _random_contraction(rng: np.random.Generator, m: int,
                        target_norm: float) -> np.ndarray:
    g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    norm = np.linalg.norm(g, 2)
    if norm < 1e-12:
        return np.zeros((m, m), dtype=complex)
    return g * (target_norm / norm)


def generate(spec: EnsembleSpec) -> VerblunskySequence:
    """Deterministic sequence from a spec: identity boundaries, sampled interior."""
    rng = np.random.default_rng(spec.seed)
    eye = np.eye(spec.m, dtype=complex)
    alphas = {spec.k_min: unitary(eye), spec.k_max: unitary(eye)}
    for k in range(spec.k_min + 1, spec.k_max):
        if spec.distribution is Distribution.UNIFORM_DISK:
            target = spec.radius_max * np.sqrt(rng.uniform())
        else:
            target = spec.radius_max
        alphas[k] = contractive(_random_contraction(rng, spec.m, target))
    return VerblunskySequence(spec.m, spec.k_min, spec.k_max, alphas)


def random_unitary(rng: np.random.Generator, m: int) -> np.ndarray:
    """Haar-ish unitary from the QR of a complex Gaussian matrix."""
    g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    q, r = np.linalg.qr(g)
    phases = np.diag(r).copy()
    phases = phases / np.abs(phases)
    return q * phases
