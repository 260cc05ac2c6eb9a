"""Single-qubit Kraus channels, their fidelities, and the random channel family."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .tensor_algebra import (ATOL, I2, X, Y, Z, dagger, hermitian_eig,
                             max_abs)

STANDARD_KINDS = ("bf", "bpf", "pf", "ad", "gad", "dep")
MAX_RESAMPLE = 10 ** 6
PSD_TOL = 1e-10

# maximally entangled |S+> = (|00> + |11>)/sqrt(2)
S_PLUS = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)

# the six Pauli eigenstates form a state 2-design on one qubit
TWO_DESIGN_STATES = [
    np.array(v, dtype=complex) / np.linalg.norm(v)
    for v in ([1, 0], [0, 1], [1, 1], [1, -1], [1, 1j], [1, -1j])
]


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    kraus: tuple
    label: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        ks = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not 1 <= len(ks) <= 4:
            raise ValueError(f"expected 1..4 Kraus operators, got {len(ks)}")
        for k in ks:
            if k.shape != (2, 2):
                raise ValueError(f"Kraus operator has shape {k.shape}, expected (2, 2)")
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ks)

    def __call__(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return sum(k @ rho @ dagger(k) for k in self.kraus)


@dataclass(frozen=True)
class FidelityReport:
    entanglement_fidelity: float
    average_fidelity: float
    dimension: int = 2


@dataclass(frozen=True)
class CPTPReport:
    ok: bool
    trace_deficit: float
    min_choi_eigenvalue: float
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _damping_amplitudes(p: float) -> tuple[float, float]:
    sp = math.sqrt(p)
    return abs(2 * sp - 1), math.sqrt(max(0.0, 4 * (sp - p)))


def make_standard_channel(kind: str, p: float) -> QuantumChannel:
    """One of the six reference channels with no-error probability ``p``.

    The damping channels (``ad``, ``gad``) are only labelled correctly for
    ``p >= 1/4``; below that their fidelity is not ``p`` and we refuse.
    """
    kind = kind.lower()
    if kind not in STANDARD_KINDS:
        raise ValueError(f"unknown channel kind {kind!r}; expected one of {STANDARD_KINDS}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    if kind in ("ad", "gad") and p < 0.25:
        raise ValueError(f"{kind} channel needs p >= 1/4 so that its fidelity equals p (got {p})")

    sp, sq = math.sqrt(p), math.sqrt(1 - p)
    params: dict[str, Any] = {"p": p}
    if kind == "bf":
        kraus = [sp * I2, sq * X]
    elif kind == "bpf":
        kraus = [sp * I2, sq * Y]
    elif kind == "pf":
        kraus = [sp * I2, sq * Z]
    elif kind == "dep":
        s3 = math.sqrt((1 - p) / 3)
        kraus = [sp * I2, s3 * X, s3 * Y, s3 * Z]
    else:
        p1, p2 = _damping_amplitudes(p)
        params.update(P1=p1, P2=p2)
        e1 = np.array([[1, 0], [0, p1]], dtype=complex)
        e2 = np.array([[0, p2], [0, 0]], dtype=complex)
        if kind == "ad":
            kraus = [e1, e2]
        else:
            e3 = np.array([[p1, 0], [0, 1]], dtype=complex)
            e4 = np.array([[0, 0], [p2, 0]], dtype=complex)
            kraus = [sp * e1, sp * e2, sq * e3, sq * e4]
    # drop exactly-zero operators (p = 0 or 1) but keep at least one
    nonzero = [k for k in kraus if np.any(k != 0)] or kraus[:1]
    return QuantumChannel(tuple(nonzero), label=kind, params=params)


def identity_channel() -> QuantumChannel:
    return QuantumChannel((I2,), label="identity")


def entanglement_fidelity(ch: QuantumChannel) -> float:
    """``F = 1/4 sum_m |Tr K_m|^2``."""
    return float(sum(abs(np.trace(k)) ** 2 for k in ch.kraus) / 4.0)


def entanglement_fidelity_direct(ch: QuantumChannel) -> float:
    """``<S+| (ch x I)(|S+><S+|) |S+>`` by explicit 4x4 evolution."""
    rho = np.outer(S_PLUS, S_PLUS.conj())
    out = np.zeros((4, 4), dtype=complex)
    for k in ch.kraus:
        kk = np.kron(k, I2)
        out += kk @ rho @ dagger(kk)
    return float((S_PLUS.conj() @ out @ S_PLUS).real)


def two_design_fidelity(ch: QuantumChannel) -> float:
    vals = [(psi.conj() @ ch(np.outer(psi, psi.conj())) @ psi).real for psi in TWO_DESIGN_STATES]
    return float(np.mean(vals))


def average_fidelity(ch: QuantumChannel, dim: int = 2) -> FidelityReport:
    f = entanglement_fidelity(ch)
    return FidelityReport(f, (dim * f + 1) / (dim + 1), dim)


def choi_matrix(ch: QuantumChannel) -> np.ndarray:
    """Choi matrix with entries ``<a|ch(|b><d|)|c>`` at row ``(a, b)``, column ``(c, d)``.

    Trace 2, and the partial trace over the output (first) factor is the
    identity for a trace-preserving map.
    """
    vecs = [k.reshape(4) for k in ch.kraus]
    return sum(np.outer(v, v.conj()) for v in vecs)


def validate_cptp(ch: QuantumChannel, atol: float = ATOL) -> CPTPReport:
    total = sum(dagger(k) @ k for k in ch.kraus)
    deficit = float(np.real(np.trace(I2 - total)) / 2)
    dev = max_abs(total - I2)
    eigs, _ = hermitian_eig(choi_matrix(ch))
    min_eig = float(eigs[-1])
    problems = []
    if dev > atol:
        problems.append(f"sum K^dag K deviates from I by {dev:.3g} (trace deficit {deficit:.3g})")
    if min_eig < -PSD_TOL:
        problems.append(f"Choi matrix has eigenvalue {min_eig:.3g}")
    return CPTPReport(not problems, deficit, min_eig, "; ".join(problems))


# --- random channel family -------------------------------------------------

def rotation(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, s * np.exp(-1j * phi)],
                     [-s * np.exp(1j * phi), c]], dtype=complex)


def arbitrary_channel(alpha: float, beta: float, gamma: float,
                      theta: float = 0.0, phi: float = 0.0) -> QuantumChannel:
    """Four-operator channel ``U A_m U^dagger`` with ``U = rotation(theta, phi)``."""
    ca, sa = math.cos(alpha), math.sin(alpha)
    cb, sb = math.cos(beta), math.sin(beta)
    cg, sg = math.cos(gamma), math.sin(gamma)
    bare = [
        np.array([[ca, 0], [0, sb * cg]], dtype=complex),
        np.array([[0, 0], [sa * sg, 0]], dtype=complex),
        np.array([[0, sb * sg], [0, 0]], dtype=complex),
        np.array([[sa * cg, 0], [0, cb]], dtype=complex),
    ]
    u = rotation(theta, phi)
    kraus = tuple(u @ a @ dagger(u) for a in bare)
    params = dict(alpha=alpha, beta=beta, gamma=gamma, theta=theta, phi=phi)
    return QuantumChannel(kraus, label="arbitrary", params=params)


def fidelity_roots(f0: float, alpha: float, beta: float) -> list[float]:
    """Admissible ``cos(gamma)`` values giving entanglement fidelity ``f0``.

    Solves ``(sin^2 b + sin^2 a) c^2 + 2 sin(a + b) c + cos^2 a + cos^2 b - 4 f0 = 0``
    and keeps the real roots with ``|c| <= 1``.
    """
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    qa = sb * sb + sa * sa
    qb = 2 * (ca * sb + cb * sa)
    qc = ca * ca + cb * cb - 4 * f0
    if qa < 1e-14:
        return []
    disc = qb * qb - 4 * qa * qc
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    # numerically stable pair of roots
    q = -0.5 * (qb + math.copysign(sq, qb)) if qb != 0 else -0.5 * sq
    roots = [q / qa, qc / q] if q != 0 else [0.0, 0.0]
    if disc == 0:
        roots = roots[:1]
    return sorted(r for r in roots if abs(r) <= 1.0)


def sample_arbitrary_channel(f0: float, rng: np.random.Generator) -> QuantumChannel:
    """Draw a random channel from the four-operator family with fidelity ``f0``.

    ``alpha, beta ~ U[0, 2pi)``, ``theta ~ U[0, pi]``, ``phi ~ U[0, 2pi)``;
    ``gamma`` is solved from the fidelity constraint, picking uniformly
    between two admissible roots, with ``sin(gamma) >= 0``.
    """
    if not 0.25 < f0 <= 1.0:
        raise ValueError(f"f0={f0} outside (1/4, 1]")
    if f0 == 1.0:
        # only the line alpha + beta = pi/2 with gamma = 0 is admissible
        alpha = rng.uniform(0.0, 2 * math.pi)
        theta = rng.uniform(0.0, math.pi)
        phi = rng.uniform(0.0, 2 * math.pi)
        return arbitrary_channel(alpha, math.pi / 2 - alpha, 0.0, theta, phi)
    for _ in range(MAX_RESAMPLE):
        alpha, beta = rng.uniform(0.0, 2 * math.pi, size=2)
        roots = fidelity_roots(f0, alpha, beta)
        if roots:
            break
    else:
        raise RuntimeError(f"no admissible channel found for f0={f0} after {MAX_RESAMPLE} draws")
    c = roots[int(rng.integers(len(roots)))]
    theta = rng.uniform(0.0, math.pi)
    phi = rng.uniform(0.0, 2 * math.pi)
    gamma = math.acos(c)
    return arbitrary_channel(float(alpha), float(beta), gamma, float(theta), float(phi))


# --- JSON ----------------------------------------------------------------

def matrix_to_json(m) -> list:
    m = np.asarray(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.ndim != 3 or a.shape[-1] != 2:
        raise ValueError("matrix must be nested [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def channel_to_json(ch: QuantumChannel) -> dict:
    out: dict[str, Any] = {"kind": ch.label}
    if ch.label in STANDARD_KINDS:
        out["p"] = ch.params["p"]
    elif ch.label == "arbitrary":
        out.update({k: ch.params[k] for k in ("alpha", "beta", "gamma", "theta", "phi")})
    out["kraus"] = [matrix_to_json(k) for k in ch.kraus]
    return out


def channel_from_json(spec: dict) -> QuantumChannel:
    kind = str(spec.get("kind", "")).lower()
    if kind in STANDARD_KINDS:
        return make_standard_channel(kind, float(spec["p"]))
    if kind == "arbitrary":
        return arbitrary_channel(*(float(spec.get(k, 0.0)) for k in ("alpha", "beta", "gamma", "theta", "phi")))
    if kind == "identity":
        return identity_channel()
    if "kraus" in spec:
        ch = QuantumChannel(tuple(matrix_from_json(k) for k in spec["kraus"]), label=kind or "custom")
        report = validate_cptp(ch)
        if not report:
            raise ValueError(f"channel is not CPTP: {report.message}")
        return ch
    raise ValueError(f"cannot build a channel from {spec!r}")
