"""supertau: exact symbolic super tau-covers of bihamiltonian hierarchies."""

from .algebra import (
    DiffPoly, JetRing, Q, U, SIG, TH, F1, PHI, T, TAU,
    antiderivative, derivation, free_dx, integrate_in,
    NotATotalDerivative, NotInvertible, UnsupportedGenerators,
)

__all__ = [
    "DiffPoly", "JetRing", "Q", "U", "SIG", "TH", "F1", "PHI", "T", "TAU",
    "antiderivative", "derivation", "free_dx", "integrate_in",
    "NotATotalDerivative", "NotInvertible", "UnsupportedGenerators",
]

__version__ = "0.1.0"
