"""Exceptions for evaluation points and linear solves, plus small guards.

Validation errors tied to coefficient data (contractivity, unitarity,
shape) live next to the data model in coefficients.py; this module owns
the failures that arise while evaluating formulas at a spectral point z.
"""

from __future__ import annotations


class ZeroZ(ValueError):
    """The formula is not defined at z = 0."""


class ZOnUnitCircle(ValueError):
    """Resolvent evaluation requested too close to the unit circle."""


class SingularSolve(ValueError):
    """A dense linear solve failed; z is too close to the spectrum."""


class SingularFactor(ValueError):
    """A matrix factor that must be inverted is singular."""


class SingularSolutionValue(ValueError):
    """A solution value that must be inverted is singular."""


class SingularWronskian(ValueError):
    """M_plus - M_minus is numerically singular at this z."""


UNIT_CIRCLE_TOL = 1e-6


def require_nonzero(z) -> complex:
    """Coerce z to complex and reject exact zero."""
    z = complex(z)
    if z == 0:
        raise ZeroZ("z = 0 is not a valid evaluation point here")
    return z


def require_off_circle(z, allow_zero: bool = False, tol: float = UNIT_CIRCLE_TOL) -> complex:
    """Coerce z to complex; reject the unit circle and (optionally) zero."""
    z = complex(z)
    if z == 0 and not allow_zero:
        raise ZeroZ("z = 0 is not a valid evaluation point here")
    if abs(abs(z) - 1.0) < tol:
        raise ZOnUnitCircle(
            f"|z| = {abs(z):.8g} is within {tol:g} of the unit circle"
        )
    return z
