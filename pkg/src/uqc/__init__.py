"""
Universal quantum circuits: templates that take a classical encoding of a
circuit as extra input and then act as that circuit on their data qubits.
"""
from .circuit import (Circuit, CircuitError, CircuitMetrics, FamilyError, Gate, GridFormatError,
                      Layer, metrics, parse_circuit, serialize_circuit)
from .encoding import Encoding, EncodingError, Slot, SlotMap
from .simulator import (EquivalenceReport, RegisterLayout, StateVector, apply_gate, basis_state,
                        run, specialize_classical, unitary_of, verify_encoding)
from .depth_universal import (CapacityError, NormalizedCircuit, UniversalTemplate, build_universal,
                              depth_report, encode, encode_circuit, normalize)

__version__ = "0.1.0"
