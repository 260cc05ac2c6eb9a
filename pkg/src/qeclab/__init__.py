"""Effective logical channels of small quantum codes under heterogeneous noise."""

from .channels import (QuantumChannel, arbitrary_channel, average_fidelity,
                       entanglement_fidelity, make_standard_channel,
                       sample_arbitrary_channel, validate_cptp)
from .codes import CodeSpec, build_five_qubit_code, build_steane_code, verify_code
from .effective import (ChoiMatrix, NoiseModel, ProcessTomogram, concatenate,
                        effective_channel, effective_fidelity, kraus_from_choi)
from .oracles import oracle_eval

__version__ = "0.1.0"

__all__ = [
    "QuantumChannel", "arbitrary_channel", "average_fidelity", "entanglement_fidelity",
    "make_standard_channel", "sample_arbitrary_channel", "validate_cptp",
    "CodeSpec", "build_five_qubit_code", "build_steane_code", "verify_code",
    "ChoiMatrix", "NoiseModel", "ProcessTomogram", "concatenate", "effective_channel",
    "effective_fidelity", "kraus_from_choi", "oracle_eval",
]
