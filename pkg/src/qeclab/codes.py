"""Five-qubit and Steane codes as explicit codewords and encoding unitaries.

The encoder maps ``|a_m> (x) |s>`` to ``E_m |s_L>``, where ``|a_m>`` is the
computational basis state of the ``n - 1`` ancilla qubits with ``m`` read
as a binary integer. Ancillas occupy tensor positions ``0 .. n-2`` and the
data qubit position ``n - 1``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .tensor_algebra import basis_state, dagger, max_abs, pauli_string

FIVE_ZERO = (
    "+00000 +10010 +01001 +10100 +01010 -11011 -00110 -11000 "
    "-11101 -00011 -11110 -01111 -10001 -01100 -10111 +00101"
)
FIVE_ONE = (
    "+11111 +01101 +10110 +01011 +10101 -00100 -11001 -00111 "
    "-00010 -11100 -00001 -10000 -01110 -10011 -01000 +11010"
)
STEANE_ZERO = "0000000 1010101 0110011 1100110 0001111 1011010 0111100 1101001"
STEANE_ONE = "1111111 0101010 1001100 0011001 1110000 0100101 1000011 0010110"

# Weight-two Steane errors, written "x1y2" for sigma_x on qubit 1 times
# sigma_y on qubit 2 (qubits numbered from 1). One representative per
# residual syndrome class; with this choice the mixed seven-qubit noise
# model reproduces the reference closed-form fidelity `f7_mixed` exactly.
STEANE_REFERENCE_PAIRS = (
    "x1y2 z1x2 y1z3 z1x3 x1z4 z1x4 x1y5 x1z5 x1z6 x1z7 y1x7 x2y3 x2z3 x2z4 "
    "x2z5 x2z6 z2x6 x2z7 z2x7 z2y7 x3y4 z3x4 x3z5 z3x5 x3z6 x3z7 y3z7 z4x5 "
    "z4y5 x4z6 y4z6 z4x6 x4z7 z4y7 x5z6 z5x6 z5y6 x5z7 y5z7 x6z7 z6x7 z6y7"
).split()

# sigma_x on qubit i times sigma_z on qubit j, all ordered pairs i != j
STEANE_CANONICAL_PAIRS = tuple(
    f"x{i}z{j}" for i in range(1, 8) for j in range(1, 8) if i != j
)

WEIGHT_TWO_SETS = {"reference": STEANE_REFERENCE_PAIRS, "canonical": STEANE_CANONICAL_PAIRS}

_PAIR_RE = re.compile(r"^([xyz])(\d)([xyz])(\d)$")


class CodeConstructionError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CodeSpec:
    name: str
    n_physical: int
    logical_zero: np.ndarray
    logical_one: np.ndarray
    errors: tuple
    error_labels: tuple
    encoder: np.ndarray

    @property
    def ancilla_dim(self) -> int:
        return 2 ** (self.n_physical - 1)

    @property
    def n_ancilla(self) -> int:
        return self.n_physical - 1

    @property
    def logical_states(self) -> tuple[np.ndarray, np.ndarray]:
        return self.logical_zero, self.logical_one


@dataclass(frozen=True)
class CodeReport:
    unitarity_residual: float
    gram_residual: float
    roundtrip_residual: float
    colliding_pairs: tuple = ()

    def ok(self, atol: float = 1e-12) -> bool:
        return max(self.unitarity_residual, self.gram_residual, self.roundtrip_residual) < atol


def _superposition(terms: str, norm: float) -> np.ndarray:
    v = 0
    for t in terms.split():
        sign = -1.0 if t[0] == "-" else 1.0
        v = v + sign * basis_state(t.lstrip("+-"))
    return np.asarray(v, dtype=complex) / norm


def _image_vectors(logical: Sequence[np.ndarray], errors: Sequence[np.ndarray]) -> np.ndarray:
    """Columns ``E_m |s_L>`` ordered by ``(m, s)``."""
    cols = [e @ s for e in errors for s in logical]
    return np.stack(cols, axis=1)


def _colliding(vecs: np.ndarray, labels: Sequence[str], atol: float = 1e-9) -> list[tuple[str, str]]:
    gram = dagger(vecs) @ vecs
    off = np.abs(gram - np.eye(gram.shape[0])) > atol
    out = []
    for r, c in zip(*np.nonzero(np.triu(off, 1))):
        pair = (labels[r // 2], labels[c // 2])
        if pair not in out:
            out.append(pair)
    return out


def _make_code(name: str, logical_zero, logical_one, errors, labels) -> CodeSpec:
    n = int(round(math.log2(logical_zero.size)))
    if len(errors) != 2 ** (n - 1):
        raise CodeConstructionError(f"{name}: need {2 ** (n - 1)} errors, got {len(errors)}")
    vecs = _image_vectors((logical_zero, logical_one), errors)
    collisions = _colliding(vecs, labels)
    if collisions:
        shown = ", ".join(f"{a}/{b}" for a, b in collisions[:5])
        raise CodeConstructionError(f"{name}: correctable errors are not distinguishable ({shown})")
    # column 2m + s is |a_m, s>, matching the ancilla-first layout
    encoder = vecs
    for arr in (logical_zero, logical_one, encoder):
        arr.setflags(write=False)
    return CodeSpec(name, n, logical_zero, logical_one, tuple(errors), tuple(labels), encoder)


def single_qubit_errors(n: int) -> tuple[list[np.ndarray], list[str]]:
    ops, labels = [], []
    for q in range(n):
        for p in "xyz":
            ops.append(pauli_string({q: p}, n))
            labels.append(f"{p}{q + 1}")
    return ops, labels


def parse_pair(label: str) -> dict[int, str]:
    m = _PAIR_RE.match(label)
    if not m:
        raise ValueError(f"bad weight-two label {label!r}")
    a, i, b, j = m.group(1), int(m.group(2)) - 1, m.group(3), int(m.group(4)) - 1
    if i == j:
        raise ValueError(f"weight-two label {label!r} acts twice on one qubit")
    return {i: a, j: b}


@lru_cache(maxsize=None)
def build_five_qubit_code() -> CodeSpec:
    """The perfect ``[[5,1,3]]`` code with errors ``I, X1, Y1, Z1, ..., Z5``."""
    zero = _superposition(FIVE_ZERO, 4.0)
    one = _superposition(FIVE_ONE, 4.0)
    ops, labels = single_qubit_errors(5)
    return _make_code("five", zero, one, [pauli_string({}, 5)] + ops, ["i"] + labels)


def build_steane_code(weight_two: str | Sequence[str] = "reference") -> CodeSpec:
    """The ``[[7,1,3]]`` Steane code with 64 correctable errors.

    ``weight_two`` names a preset (``"reference"`` or ``"canonical"``) or
    gives 42 labels like ``"x1z2"`` explicitly.
    """
    if isinstance(weight_two, str):
        if weight_two not in WEIGHT_TWO_SETS:
            raise ValueError(f"unknown weight-two set {weight_two!r}")
        return _build_steane(weight_two)
    return _build_steane_from(tuple(weight_two), "steane")


@lru_cache(maxsize=None)
def _build_steane(preset: str) -> CodeSpec:
    name = "steane" if preset == "reference" else f"steane-{preset}"
    return _build_steane_from(tuple(WEIGHT_TWO_SETS[preset]), name)


def _build_steane_from(pairs: tuple, name: str) -> CodeSpec:
    if len(pairs) != 42:
        raise CodeConstructionError(f"need 42 weight-two errors, got {len(pairs)}")
    zero = _superposition(STEANE_ZERO, math.sqrt(8))
    one = _superposition(STEANE_ONE, math.sqrt(8))
    ops, labels = single_qubit_errors(7)
    ops = [pauli_string({}, 7)] + ops + [pauli_string(parse_pair(p), 7) for p in pairs]
    labels = ["i"] + labels + list(pairs)
    return _make_code(name, zero, one, ops, labels)


def build_code(name: str) -> CodeSpec:
    if name == "five":
        return build_five_qubit_code()
    if name == "steane":
        return build_steane_code()
    if name.startswith("steane-"):
        return build_steane_code(name.split("-", 1)[1])
    raise ValueError(f"unknown code {name!r}; expected 'five' or 'steane'")


def verify_code(code: CodeSpec) -> CodeReport:
    u = code.encoder
    dim = u.shape[0]
    unit = max_abs(dagger(u) @ u - np.eye(dim))
    vecs = _image_vectors(code.logical_states, code.errors)
    gram = max_abs(dagger(vecs) @ vecs - np.eye(vecs.shape[1]))
    rt = 0.0
    for m, e in enumerate(code.errors):
        for s, logical in enumerate(code.logical_states):
            col = u @ basis_state(format(2 * m + s, f"0{code.n_physical}b"))
            rt = max(rt, float(np.linalg.norm(col - e @ logical)))
    return CodeReport(unit, gram, rt, tuple(_colliding(vecs, code.error_labels)))


def weight_two_classes() -> list[list[str]]:
    """Group all weight-two Paulis that fit in the Steane code by syndrome class.

    Each class holds the interchangeable representatives for one of the 42
    syndromes not used by the identity and single-qubit errors.
    """
    base = build_steane_code("canonical")
    used = _image_vectors(base.logical_states, base.errors[:22])
    classes: list[list[tuple[str, np.ndarray]]] = []
    for i, j in itertools.combinations(range(7), 2):
        for a, b in itertools.product("xyz", repeat=2):
            label = f"{a}{i + 1}{b}{j + 1}"
            v = _image_vectors(base.logical_states, [pauli_string({i: a, j: b}, 7)])
            if max_abs(dagger(used) @ v) > 1e-9:
                continue
            for cl in classes:
                if max_abs(dagger(cl[0][1]) @ v) > 1e-9:
                    cl.append((label, v))
                    break
            else:
                classes.append([(label, v)])
    return [[lab for lab, _ in cl] for cl in classes]
