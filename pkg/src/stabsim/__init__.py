"""Stabilizer-formalism simulation of Clifford circuits in the Heisenberg picture."""

from .pauli import GeneratorSet, PauliError, PauliOperator, canonicalize, membership, parse_pauli
from .tableau import InputKind, MeasureCase, MeasurementRecord, Tableau, TableauError
from .circuit import Circuit, CircuitError, CircuitSyntaxError, format_trace, parse, run
from .codes import CodeError, StabilizerCode, build_syndrome_table, distance, experiment, parse_code, syndrome, validate
from . import oracle

__version__ = "0.1.0"

__all__ = [
    "GeneratorSet", "PauliError", "PauliOperator", "canonicalize", "membership", "parse_pauli",
    "InputKind", "MeasureCase", "MeasurementRecord", "Tableau", "TableauError",
    "Circuit", "CircuitError", "CircuitSyntaxError", "format_trace", "parse", "run",
    "CodeError", "StabilizerCode", "build_syndrome_table", "distance", "experiment",
    "parse_code", "syndrome", "validate", "oracle",
]
