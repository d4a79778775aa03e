"""Simulation library for hybrid quantum-automaton Clifford circuits.

Modules: ``gf2`` (bit-packed GF(2) linear algebra), ``circuit`` (families and
realizations), ``stabilizer`` (graph-state and tableau engines), ``particles``
(dual classical particle models), ``codes`` (rank-based code distances),
``oracle`` (exact small-system references), ``stats`` (ensembles and fits)
and ``cli``.
"""

__version__ = "0.1.0"

from .circuit import CircuitSpec, ConfigError, Family, Realization, realization_for, sample_realization
from .stabilizer import QAState, StabilizerTableau

__all__ = [
    "CircuitSpec",
    "ConfigError",
    "Family",
    "QAState",
    "Realization",
    "StabilizerTableau",
    "realization_for",
    "sample_realization",
]
