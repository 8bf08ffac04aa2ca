"""Partial error correction: clean (encoded) and noisy qubits in one circuit."""

from .pauli import PauliString, commutes, pauli_mul, weight
from .tableau import CliffordGate, StabilizerTableau

__version__ = "0.1.0"

__all__ = ["PauliString", "pauli_mul", "commutes", "weight", "CliffordGate", "StabilizerTableau"]
