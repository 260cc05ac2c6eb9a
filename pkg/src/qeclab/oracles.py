"""Closed-form effective-channel fidelities for the reference noise models.

All polynomials are stored as coefficients in ``s = sqrt(p)`` so that the
half-integer powers are exact and evaluation is a single Horner pass.

Noise models:

* ``f5_dep``: depolarizing on all five qubits of the five-qubit code.
* ``f5_mixed``: bit flip, bit-phase flip, phase flip, amplitude damping,
  generalized amplitude damping on qubits 1..5.
* ``f7_dep`` / ``f7_mixed``: the Steane analogues, the mixed model padded
  with two depolarizing channels.
* ``f5_bitflip``: bit flip on all five qubits (probability that at most one
  qubit flips).
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P


def _coeffs(terms: dict[int, int], denom: int) -> np.ndarray:
    c = np.zeros(max(terms) + 1)
    for k, v in terms.items():
        c[k] = v
    return c / denom


# keys are powers of sqrt(p)
F5_DEP = _coeffs({0: 5, 2: 20, 4: -70, 6: 40, 8: 160, 10: -128}, 27)
F5_MIXED = _coeffs({2: 3, 3: -4, 4: -3, 5: 4, 6: 5, 7: -8, 8: 4, 9: 8, 10: -8}, 1)
GAP5 = _coeffs({0: -5, 2: 61, 3: -108, 4: -11, 5: 108, 6: 95, 7: -216,
                8: -52, 9: 216, 10: -88}, 27)
F7_DEP = _coeffs({0: 154, 2: 350, 4: -1491, 6: 2296, 8: 140, 10: -4368,
                  12: 8512, 14: -4864}, 729)
F7_MIXED = _coeffs({0: 3, 1: 5, 2: -15, 3: -4, 4: 46, 5: -28, 6: -136, 7: 157,
                    8: 347, 9: -618, 10: -48, 11: 576, 12: -244, 13: -16,
                    14: -16}, 9)
GAP7 = _coeffs({0: 89, 1: 405, 2: -1565, 3: -324, 4: 5217, 5: -2268,
                6: -13312, 7: 12717, 8: 27967, 9: -50058, 10: 480,
                11: 46656, 12: -28276, 13: -1296, 14: 3568}, 729)
F5_BITFLIP = _coeffs({8: 5, 10: -4}, 1)


def _check_p(p: float, open_right: bool = False) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0 or (open_right and p >= 1.0):
        bound = "[0, 1)" if open_right else "[0, 1]"
        raise ValueError(f"p={p} outside {bound}")
    return p


def _poly(c: np.ndarray) -> Callable[[float], float]:
    def f(p: float) -> float:
        return float(P.polyval(np.sqrt(_check_p(p)), c))
    return f


f5_dep = _poly(F5_DEP)
f5_mixed = _poly(F5_MIXED)
gap5 = _poly(GAP5)
f7_dep = _poly(F7_DEP)
f7_mixed = _poly(F7_MIXED)
gap7 = _poly(GAP7)
f5_bitflip = _poly(F5_BITFLIP)


def gap5_bitflip(p: float) -> float:
    return f5_bitflip(p) - f5_dep(p)


def rdev5(p: float) -> float:
    """Five-qubit gap relative to the depolarizing improvement ``f5_dep - p``."""
    p = _check_p(p, open_right=True)
    return gap5(p) / (f5_dep(p) - p)


def rdev7(p: float) -> float:
    p = _check_p(p, open_right=True)
    return abs(gap7(p)) / (f7_dep(p) - p)


ORACLES: dict[str, Callable[[float], float]] = {
    "f5_dep": f5_dep,
    "f5_mixed": f5_mixed,
    "gap5": gap5,
    "rdev5": rdev5,
    "f7_dep": f7_dep,
    "f7_mixed": f7_mixed,
    "gap7": gap7,
    "rdev7": rdev7,
    "f5_bitflip": f5_bitflip,
    "gap5_bitflip": gap5_bitflip,
}


def oracle_eval(name: str, p: float) -> float:
    try:
        fn = ORACLES[name]
    except KeyError:
        raise ValueError(f"unknown oracle {name!r}; expected one of {sorted(ORACLES)}") from None
    return fn(p)
