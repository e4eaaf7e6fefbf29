"""Numerical workbench for the Hermitian supermatrix model with external source."""

from .model import (
    AccuracyError,
    ChPolySpec,
    DomainError,
    Mode,
    Potential,
    SmwError,
    SourceSpec,
    UnsupportedError,
    WeightScheme,
    weight_bosonic,
    weight_fermionic,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "ChPolySpec", "DomainError", "Mode", "Potential", "SmwError", "SourceSpec",
    "UnsupportedError", "WeightScheme", "weight_bosonic", "weight_fermionic",
]
