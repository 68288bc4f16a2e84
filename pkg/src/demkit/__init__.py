"""Detector error models for noisy Clifford circuits.

Turns circuits, measurement schedules, and component-level procedures into
detector error models, then uses those models to verify fault tolerance,
compute circuit distance, decode, and estimate logical error rates.
"""

from .gf2 import BitMatrix
from .pauli import PauliString, SymbolicSign, Tableau, MeasureOutcome, commutes
from .circuit import Circuit, Instruction, ObservableDecl, DetectorDecl, ParseError, parse, print_circuit

__all__ = [
    "BitMatrix",
    "PauliString",
    "SymbolicSign",
    "Tableau",
    "MeasureOutcome",
    "commutes",
    "Circuit",
    "Instruction",
    "ObservableDecl",
    "DetectorDecl",
    "ParseError",
    "parse",
    "print_circuit",
]
