"""Exception types raised by evolsym."""

from __future__ import annotations


class OperatorFormatError(ValueError):
    """Malformed operator-description document."""


class DimensionMismatch(ValueError):
    """Argument shape does not match the operator or grid."""


class SizeLimitError(ValueError):
    """System too large for exact symbolic expansion."""


class DegenerateLeadingCoefficient(ValueError):
    """Leading coefficient Q_m(i xi) vanishes at the requested frequency."""

    def __init__(self, xi, value):
        super().__init__(f"leading coefficient vanishes at xi={list(xi)} (value {value!r})")
        self.xi = tuple(xi)
        self.value = value


class NumericalFailure(ArithmeticError):
    """An iterative linear-algebra routine failed to converge."""


class MatrixExpOverflow(OverflowError):
    """exp(A) is not representable in floating point."""

    def __init__(self, norm, where=None, index=None):
        msg = f"matrix exponential overflow (||A||_2 = {norm:.6g})"
        if where is not None:
            msg += f" at xi={[float(v) for v in where]}"
        super().__init__(msg)
        self.norm = norm
        self.xi = None if where is None else tuple(float(v) for v in where)
        self.index = index


class PetrovskiiViolation(RuntimeError):
    """Propagation refused: the operator fails the spectral-bound test."""


class ConeUndefined(ValueError):
    """Propagation cone requested for a non-hyperbolic operator."""


class GridResolutionError(ValueError):
    """Grid too coarse or box too small for the requested estimate."""
