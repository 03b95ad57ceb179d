"""Caratheodory functions, Herglotz sums, Cayley transforms, reflection.

A matrix function analytic on the open unit disk with positive
semidefinite Hermitian part is determined by a Hermitian constant and a
positive matrix measure on the circle. Finite windows only ever produce
finitely many atoms, so the measure type here is purely atomic; smooth
measures are represented by quadrature grids of small atoms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficients import _as_square
from .errors import SingularFactor

PSD_TOL = 1e-10
CIRCLE_TOL = 1e-8


class ZAtAtom(ValueError):
    """Evaluation point coincides with an atom of the measure."""


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many PSD matrix weights on the unit circle.

    atoms is a tuple of (zeta, weight) pairs with |zeta| = 1 and weight
    an m x m positive semidefinite matrix; C is the Hermitian constant
    entering through i C.
    """

    atoms: tuple
    C: np.ndarray

    def __post_init__(self):
        C = _as_square(self.C)
        if np.linalg.norm(C - C.conj().T) > PSD_TOL * max(1.0, np.linalg.norm(C)):
            raise ValueError("C must be Hermitian")
        m = C.shape[0]
        checked = []
        for zeta, weight in self.atoms:
            zeta = complex(zeta)
            if abs(abs(zeta) - 1.0) > CIRCLE_TOL:
                raise ValueError(f"atom at {zeta} is not on the unit circle")
            w = _as_square(weight)
            if w.shape != (m, m):
                raise ValueError("atom weight size differs from C")
            herm = (w + w.conj().T) / 2.0
            if np.linalg.norm(w - herm) > PSD_TOL * max(1.0, np.linalg.norm(w)):
                raise ValueError(f"weight at {zeta} is not Hermitian")
            if np.linalg.eigvalsh(herm).min() < -PSD_TOL:
                raise ValueError(f"weight at {zeta} is not positive semidefinite")
            checked.append((zeta, w))
        object.__setattr__(self, "atoms", tuple(checked))
        object.__setattr__(self, "C", C)

    @property
    def m(self) -> int:
        return self.C.shape[0]

    def total_mass(self) -> np.ndarray:
        out = np.zeros((self.m, self.m), dtype=complex)
        for _, w in self.atoms:
            out += w
        return out


def uniform_grid_measure(n: int, m: int = 1) -> AtomicMeasure:
    """Quadrature stand-in for normalized arc-length: n equal atoms."""
    if n < 1:
        raise ValueError("need at least one atom")
    eye = np.eye(m, dtype=complex)
    atoms = tuple(
        (np.exp(2j * np.pi * j / n), eye / n) for j in range(n)
    )
    return AtomicMeasure(atoms=atoms, C=np.zeros((m, m), dtype=complex))


def herglotz_eval(measure: AtomicMeasure, z) -> np.ndarray:
    """Evaluate i C + sum_j weight_j (zeta_j + z)/(zeta_j - z)."""
    z = complex(z)
    out = 1j * measure.C.astype(complex)
    for zeta, weight in measure.atoms:
        denom = zeta - z
        if abs(denom) < 1e-12:
            raise ZAtAtom(f"z = {z} coincides with the atom at {zeta}")
        out = out + weight * ((zeta + z) / denom)
    return out


@dataclass(frozen=True)
class ValidityReport:
    """Hermitian-part eigenvalue floor per sample and the verdict."""

    valid: bool
    min_eigenvalues: tuple
    tol: float


def is_caratheodory(samples, tol: float = PSD_TOL) -> ValidityReport:
    """Check Re F(z) >= 0 over (z, F) samples taken inside the disk.

    Returns the smallest Hermitian-part eigenvalue per sample; valid
    means every one of them clears -tol.
    """
    floors = []
    for z, F in samples:
        if abs(complex(z)) >= 1.0:
            raise ValueError(f"sample point {z} is not inside the unit disk")
        F = _as_square(F)
        herm = (F + F.conj().T) / 2.0
        floors.append(float(np.linalg.eigvalsh(herm).min()))
    valid = all(f >= -tol for f in floors)
    return ValidityReport(valid=valid, min_eigenvalues=tuple(floors), tol=tol)


def cayley(F: np.ndarray) -> np.ndarray:
    """Phi = (F - I)(F + I)^{-1}, mapping Caratheodory to Schur."""
    F = _as_square(F)
    eye = np.eye(F.shape[0])
    try:
        out = np.linalg.solve((F + eye).T, (F - eye).T).T
    except np.linalg.LinAlgError as exc:
        raise SingularFactor("F + I is singular") from exc
    return out


def inverse_cayley(phi: np.ndarray) -> np.ndarray:
    """F = (I - Phi)^{-1}(I + Phi), mapping Schur back to Caratheodory."""
    phi = _as_square(phi)
    eye = np.eye(phi.shape[0])
    try:
        out = np.linalg.solve(eye - phi, eye + phi)
    except np.linalg.LinAlgError as exc:
        raise SingularFactor("I - Phi is singular") from exc
    return out


def reflect(z, F: np.ndarray):
    """Continue a disk sample across the circle: (z, F) -> (1/conj(z), -F*)."""
    z = complex(z)
    if z == 0:
        raise ValueError("z = 0 has no finite reflection point")
    return 1.0 / np.conj(z), -_as_square(F).conj().T
