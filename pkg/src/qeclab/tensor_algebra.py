"""Dense complex linear algebra on small multi-qubit Hilbert spaces.

Matrices are plain ``numpy`` complex128 arrays. Tensor factor 0 is the
leftmost (most significant) index everywhere in this package, so qubit ``q``
of an ``n``-qubit register corresponds to bit ``n - 1 - q`` of the basis
index.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

ATOL = 1e-12
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"i": I2, "x": X, "y": Y, "z": Z}


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def is_hermitian(a: np.ndarray, atol: float = ATOL) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and max_abs(a - dagger(a)) <= atol


def is_unitary(a: np.ndarray, atol: float = ATOL) -> bool:
    a = np.asarray(a)
    if a.shape[0] != a.shape[1]:
        return False
    return max_abs(dagger(a) @ a - np.eye(a.shape[0])) <= atol


def kron(a, b) -> np.ndarray:
    """Kronecker product, ``a`` on the leading (most significant) factor."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(factors: Iterable) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, as_matrix(f))
    return out


def pauli_string(ops: dict[int, str], n_qubits: int) -> np.ndarray:
    """Dense operator for a Pauli product, e.g. ``{0: "x", 3: "z"}``."""
    return kron_all(PAULI[ops.get(q, "i")] for q in range(n_qubits))


def basis_state(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def superoperator(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor ``S[a, b, i, j] = sum_k K[a, i] conj(K[b, j])``."""
    ks = np.asarray(kraus, dtype=complex)
    return np.einsum("kai,kbj->abij", ks, ks.conj())


def apply_superoperator(rho: np.ndarray, sop: np.ndarray, qubit: int,
                        n_qubits: int) -> np.ndarray:
    """Apply a one-qubit superoperator to ``qubit`` of a (batched) operator.

    ``rho`` may carry leading batch axes; the last two must be ``2**n``.
    The map is linear, so ``rho`` need not be Hermitian.
    """
    dim = 2 ** n_qubits
    if rho.shape[-2:] != (dim, dim):
        raise ValueError(f"operator shape {rho.shape[-2:]} does not match {n_qubits} qubits")
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {n_qubits} qubits")
    left = 2 ** qubit
    right = 2 ** (n_qubits - qubit - 1)
    batch = rho.shape[:-2]
    t = rho.reshape(batch + (left, 2, right, left, 2, right))
    out = np.einsum("abij,...xiyzjw->...xayzbw", sop, t)
    return out.reshape(batch + (dim, dim))


def apply_single_qubit_channel(rho, ch, qubit: int, n_qubits: int,
                               validate: bool = False) -> np.ndarray:
    """Return ``sum_m (I..A_m..I) rho (I..A_m..I)^dagger`` with ``A_m`` on ``qubit``.

    ``ch`` is anything with a ``kraus`` attribute, or a bare list of 2x2
    Kraus matrices.
    """
    kraus = getattr(ch, "kraus", ch)
    if validate:
        total = sum(dagger(k) @ k for k in kraus)
        if max_abs(total - I2) > ATOL:
            raise ValueError("channel is not trace preserving")
    rho = np.asarray(rho, dtype=complex)
    return apply_superoperator(rho, superoperator(kraus), qubit, n_qubits)


def partial_trace_ancilla(rho, n_total: int, n_ancilla: int) -> np.ndarray:
    """Trace out the first ``n_ancilla`` tensor factors.

    Works on batched input (leading axes are preserved).
    """
    rho = np.asarray(rho, dtype=complex)
    dim = 2 ** n_total
    if rho.shape[-2:] != (dim, dim):
        raise ValueError(f"operator shape {rho.shape[-2:]} does not match {n_total} qubits")
    if not 0 < n_ancilla < n_total:
        raise ValueError("need 0 < n_ancilla < n_total")
    da = 2 ** n_ancilla
    ds = dim // da
    t = rho.reshape(rho.shape[:-2] + (da, ds, da, ds))
    return np.einsum("...iaib->...ab", t)


def _jacobi_sweep(h: np.ndarray, v: np.ndarray) -> None:
    n = h.shape[0]
    for p in range(n - 1):
        for q in range(p + 1, n):
            c = h[p, q]
            r = abs(c)
            if r < 1e-300:
                continue
            a = h[p, p].real
            b = h[q, q].real
            # tan of the rotation angle, the smaller root for stability
            tau = (b - a) / (2.0 * r)
            t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
            cs = 1.0 / np.sqrt(1.0 + t * t)
            sn = t * cs
            ph = np.conj(c) / r
            w = np.array([[cs, sn], [-ph * sn, ph * cs]])
            idx = [p, q]
            h[:, idx] = h[:, idx] @ w
            h[idx, :] = dagger(w) @ h[idx, :]
            v[:, idx] = v[:, idx] @ w
            h[p, q] = h[q, p] = 0.0
            h[p, p] = h[p, p].real
            h[q, q] = h[q, q].real


def hermitian_eig(h, herm_tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues in descending
    order and eigenvectors as the columns of a unitary matrix.
    """
    h = as_matrix(h).copy()
    n = h.shape[0]
    if h.shape != (n, n):
        raise ValueError("matrix must be square")
    if max_abs(h - dagger(h)) > herm_tol:
        raise ValueError("matrix is not Hermitian")
    h = 0.5 * (h + dagger(h))
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(h)))
    for _ in range(JACOBI_MAX_SWEEPS):
        off = float(np.linalg.norm(h - np.diag(np.diag(h))))
        if off < JACOBI_TOL * scale:
            break
        _jacobi_sweep(h, v)
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = np.diag(h).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]
