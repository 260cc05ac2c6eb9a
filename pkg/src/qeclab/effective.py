"""Effective logical channel of a code by process tomography.

For each probe ``E_cd = |c><d|`` the register starts in ``|a_0><a_0| (x) E_cd``,
is encoded, exposed to independent per-qubit noise, decoded, and the
ancillas are traced out. The four outputs give the tomogram
``lam[a, b, c, d] = <a| eff(E_cd) |b>``, from which the Choi matrix and the
entanglement fidelity follow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import QuantumChannel, S_PLUS, matrix_to_json, validate_cptp
from .codes import CodeSpec
from .tensor_algebra import (I2, apply_superoperator, dagger, hermitian_eig,
                             max_abs, partial_trace_ancilla, superoperator)

CHOI_TOL = 1e-10
KRAUS_CUTOFF = 1e-12
MAX_LEVELS = 8

# probes E_cd stacked in (c, d) order
PROBES = np.zeros((2, 2, 2, 2), dtype=complex)
for _c in range(2):
    for _d in range(2):
        PROBES[_c, _d, _c, _d] = 1.0
PROBES = PROBES.reshape(4, 2, 2)


class InvalidChoiError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class NoiseModel:
    per_qubit: tuple

    def __post_init__(self):
        chans = tuple(self.per_qubit)
        for ch in chans:
            if not isinstance(ch, QuantumChannel):
                raise TypeError(f"expected QuantumChannel, got {type(ch).__name__}")
        object.__setattr__(self, "per_qubit", chans)

    def __len__(self) -> int:
        return len(self.per_qubit)

    @classmethod
    def uniform(cls, ch: QuantumChannel, n: int) -> "NoiseModel":
        return cls((ch,) * n)

    def validate(self) -> None:
        for q, ch in enumerate(self.per_qubit):
            report = validate_cptp(ch)
            if not report:
                raise ValueError(f"channel on qubit {q} is not CPTP: {report.message}")


@dataclass(frozen=True, eq=False)
class ProcessTomogram:
    lam: np.ndarray  # lam[a, b, c, d] = <a| eff(|c><d|) |b>

    def to_choi(self) -> "ChoiMatrix":
        # chi[a, b; c, d] = lam[a, c; b, d]
        chi = np.transpose(self.lam, (0, 2, 1, 3)).reshape(4, 4)
        return ChoiMatrix(chi)

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return np.einsum("abcd,cd->ab", self.lam, rho)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    chi: np.ndarray

    @property
    def fidelity(self) -> float:
        c = self.chi
        return float((c[0, 0] + c[0, 3] + c[3, 0] + c[3, 3]).real / 4.0)

    def to_tomogram(self) -> ProcessTomogram:
        lam = np.transpose(self.chi.reshape(2, 2, 2, 2), (0, 2, 1, 3))
        return ProcessTomogram(lam)

    def residuals(self) -> dict[str, float]:
        c = self.chi
        eigs, _ = hermitian_eig(0.5 * (c + dagger(c)), herm_tol=np.inf)
        out_trace = np.einsum("abad->bd", c.reshape(2, 2, 2, 2))
        return {
            "hermiticity": max_abs(c - dagger(c)),
            "min_eigenvalue": float(eigs[-1]),
            "trace": abs(complex(np.trace(c)) - 2.0),
            "partial_trace": max_abs(out_trace - I2),
        }

    def check(self, tol: float = CHOI_TOL) -> None:
        r = self.residuals()
        bad = [k for k in ("hermiticity", "trace", "partial_trace") if r[k] > tol]
        if r["min_eigenvalue"] < -tol:
            bad.append("min_eigenvalue")
        if bad:
            details = ", ".join(f"{k}={r[k]:.3g}" for k in bad)
            raise InvalidChoiError(f"Choi matrix invariants violated: {details}")


@dataclass(frozen=True, eq=False)
class EffectiveChannelReport:
    tomogram: ProcessTomogram
    choi: ChoiMatrix
    fidelity: float
    kraus: QuantumChannel | None


def _as_noise(code: CodeSpec, noise) -> NoiseModel:
    if not isinstance(noise, NoiseModel):
        noise = NoiseModel(tuple(noise))
    if len(noise) != code.n_physical:
        raise ValueError(f"noise model has {len(noise)} channels, code {code.name} needs {code.n_physical}")
    return noise


def logical_outputs(code: CodeSpec, noise) -> np.ndarray:
    """Reduced data-qubit outputs ``eff(E_cd)``, shape ``(4, 2, 2)`` in (c, d) order."""
    noise = _as_noise(code, noise)
    n = code.n_physical
    u = code.encoder
    dim = 2 ** n
    ancilla0 = np.zeros((dim // 2, dim // 2), dtype=complex)
    ancilla0[0, 0] = 1.0
    rho = np.stack([np.kron(ancilla0, e) for e in PROBES])
    rho = u @ rho @ dagger(u)
    for q, ch in enumerate(noise.per_qubit):
        rho = apply_superoperator(rho, superoperator(ch.kraus), q, n)
    rho = dagger(u) @ rho @ u
    return partial_trace_ancilla(rho, n, n - 1)


def tomogram(code: CodeSpec, noise) -> ProcessTomogram:
    out = logical_outputs(code, noise).reshape(2, 2, 2, 2)  # (c, d, a, b)
    return ProcessTomogram(np.transpose(out, (2, 3, 0, 1)))


def effective_fidelity(code: CodeSpec, noise) -> float:
    """Entanglement fidelity of the effective channel, without extra checks."""
    return tomogram(code, noise).to_choi().fidelity


def channel_tomogram(ch: QuantumChannel) -> ProcessTomogram:
    outs = np.stack([ch(e) for e in PROBES]).reshape(2, 2, 2, 2)
    return ProcessTomogram(np.transpose(outs, (2, 3, 0, 1)))


def kraus_from_choi(choi: ChoiMatrix, label: str = "effective") -> QuantumChannel:
    """Kraus operators ``K[a, c] = sqrt(mu) v[2a + c]`` from the Choi eigenvectors."""
    chi = choi.chi
    eigs, vecs = hermitian_eig(0.5 * (chi + dagger(chi)), herm_tol=CHOI_TOL)
    if eigs[-1] < -CHOI_TOL:
        raise InvalidChoiError(f"Choi matrix has negative eigenvalue {eigs[-1]:.3g}")
    kraus = [np.sqrt(mu) * vecs[:, k].reshape(2, 2) for k, mu in enumerate(eigs) if mu > KRAUS_CUTOFF]
    if not kraus:
        raise InvalidChoiError("Choi matrix has no positive eigenvalue")
    return QuantumChannel(tuple(kraus), label=label)


def effective_channel(code: CodeSpec, noise, extract_kraus: bool = True,
                      check: bool = True) -> EffectiveChannelReport:
    tomo = tomogram(code, noise)
    choi = tomo.to_choi()
    if check:
        choi.check()
    kraus = kraus_from_choi(choi) if extract_kraus else None
    return EffectiveChannelReport(tomo, choi, choi.fidelity, kraus)


def entangled_fidelity_of_tomogram(tomo: ProcessTomogram) -> float:
    """Fidelity via ``(eff x I)`` acting on ``|S+><S+|``, an independent route."""
    rho = np.zeros((4, 4), dtype=complex)
    # |S+><S+| = 1/2 sum_cd |c><d| (x) |c><d|
    for c in range(2):
        for d in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[c, d] = 1.0
            rho += 0.5 * np.kron(tomo.apply(e), e)
    return float((S_PLUS.conj() @ rho @ S_PLUS).real)


def concatenate(code: CodeSpec, base_noise, levels: int) -> list[EffectiveChannelReport]:
    """Feed each level's effective channel, copied onto every qubit, into the next."""
    if not 1 <= levels <= MAX_LEVELS:
        raise ValueError(f"levels must be in 1..{MAX_LEVELS}")
    reports = []
    noise = _as_noise(code, base_noise)
    for _ in range(levels):
        rep = effective_channel(code, noise)
        reports.append(rep)
        noise = NoiseModel.uniform(rep.kraus, code.n_physical)
    return reports


# --- JSON -----------------------------------------------------------------

def _cplx(a) -> list:
    return np.stack([np.real(a), np.imag(a)], axis=-1).tolist()


def report_to_json(rep: EffectiveChannelReport) -> dict:
    out = {
        "index_order": "ab;cd",
        "fidelity": rep.fidelity,
        "lambda": _cplx(rep.tomogram.lam),
        "chi": _cplx(rep.choi.chi),
    }
    if rep.kraus is not None:
        out["kraus"] = [matrix_to_json(k) for k in rep.kraus.kraus]
    return out


def choi_from_json(data: dict) -> ChoiMatrix:
    if data.get("index_order") != "ab;cd":
        raise ValueError("expected index_order 'ab;cd'")
    a = np.asarray(data["chi"], dtype=float)
    return ChoiMatrix(a[..., 0] + 1j * a[..., 1])
