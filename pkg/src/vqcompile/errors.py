"""Exception types shared across the package."""

from __future__ import annotations


class VqcError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(VqcError, ValueError):
    """Tensor extents or axis indices are inconsistent with the operation."""


class DecompositionError(VqcError):
    """A matrix decomposition failed to converge."""


class NonHermitianError(VqcError, ValueError):
    """An operator that must be Hermitian is not, beyond tolerance."""


class NonUnitaryError(VqcError, ValueError):
    """An operator that must be unitary is not, beyond tolerance."""


class BondDimensionError(VqcError):
    """A bond dimension exceeded the configured hard cap.

    Distinct from ordinary cutoff truncation: this signals that the state
    could not be represented even after truncation to ``chi_max``.
    """


class DenseSizeError(VqcError, ValueError):
    """System too large for a dense (2^n) code path."""


class EmbeddingError(VqcError):
    """A product-formula layout does not embed into the requested ansatz."""


class ConfigError(VqcError, ValueError):
    """A run configuration document is invalid or inconsistent."""


class NumericalError(VqcError):
    """A numerical failure (non-finite cost, bond-cap overflow) aborted a run."""
