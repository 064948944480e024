"""Dense state-vector and density-matrix algebra.

Qubit 0 is the least-significant bit of the computational-basis index, so the
amplitude of ``|q_{n-1} ... q_1 q_0>`` sits at index ``sum(q_j * 2**j)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10
PSD_TOL = 1e-10


def _n_qubits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state on ``n_qubits`` qubits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        _n_qubits_for(amps.size)
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return _n_qubits_for(self.amplitudes.size)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def normalized(cls, amplitudes) -> StateVector:
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(amps / np.linalg.norm(amps))

    @classmethod
    def basis(cls, index: int, n_qubits: int) -> StateVector:
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def zeros(cls, n_qubits: int) -> StateVector:
        return cls.basis(0, n_qubits)

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "re": self.amplitudes.real.tolist(),
            "im": self.amplitudes.imag.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> StateVector:
        amps = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        if amps.size != 1 << int(data["n_qubits"]):
            raise ValueError("amplitude count does not match n_qubits")
        return cls(amps)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        _n_qubits_for(m.shape[0])
        if np.max(np.abs(m - m.conj().T), initial=0.0) > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        if np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise ValueError("density matrix has negative eigenvalues")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_qubits(self) -> int:
        return _n_qubits_for(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> DensityMatrix:
        d = 1 << n_qubits
        return cls(np.eye(d, dtype=complex) / d)

    def to_json(self) -> dict:
        flat = self.matrix.reshape(-1)
        return {"n_qubits": self.n_qubits, "re": flat.real.tolist(), "im": flat.imag.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> DensityMatrix:
        d = 1 << int(data["n_qubits"])
        flat = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        if flat.size != d * d:
            raise ValueError("entry count does not match n_qubits")
        return cls(flat.reshape(d, d))


def _check_subset(keep: Sequence[int], n_qubits: int) -> list[int]:
    keep = [int(q) for q in keep]
    if not keep:
        raise ValueError("qubit subset must be nonempty")
    if len(set(keep)) != len(keep):
        raise ValueError(f"qubit subset {keep} has duplicates")
    if any(q < 0 or q >= n_qubits for q in keep):
        raise ValueError(f"qubit subset {keep} out of range for {n_qubits} qubits")
    return keep


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Place ``a`` on the low qubits and ``b`` on the high qubits."""
    return StateVector(np.kron(b.amplitudes, a.amplitudes))


def reduced_matrix(rho: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Partial trace on a raw matrix; result qubit j is ``keep[j]``."""
    n = _n_qubits_for(rho.shape[0])
    keep = _check_subset(keep, n)
    drop = [q for q in range(n) if q not in keep]
    # tensor axis for qubit q is n-1-q (row) and 2n-1-q (column)
    row_keep = [n - 1 - q for q in reversed(keep)]
    row_drop = [n - 1 - q for q in reversed(drop)]
    t = rho.reshape((2,) * (2 * n))
    t = t.transpose(row_keep + row_drop + [n + a for a in row_keep] + [n + a for a in row_drop])
    dk, dd = 1 << len(keep), 1 << len(drop)
    return np.einsum("ajbj->ab", t.reshape(dk, dd, dk, dd))


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    out = reduced_matrix(rho.matrix, keep)
    # restore exact Hermiticity lost to summation order
    return DensityMatrix(0.5 * (out + out.conj().T))


def fidelity_pure(psi: StateVector, rho: DensityMatrix) -> float:
    """F = <psi|rho|psi>, clamped to [0, 1]."""
    if psi.dim != rho.dim:
        raise ValueError(f"dimension mismatch: state {psi.dim}, density matrix {rho.dim}")
    v = psi.amplitudes
    f = np.vdot(v, rho.matrix @ v).real
    return float(min(1.0, max(0.0, f)))


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def apply_unitary(u: np.ndarray, psi: StateVector, check: bool = False) -> StateVector:
    u = np.asarray(u, dtype=complex)
    if u.shape != (psi.dim, psi.dim):
        raise ValueError(f"unitary of shape {u.shape} cannot act on dimension {psi.dim}")
    if check and not is_unitary(u):
        raise ValueError("matrix is not unitary")
    out = u @ psi.amplitudes
    # renormalize away roundoff so the result passes the 1e-12 norm check
    return StateVector(out / np.linalg.norm(out))


def expectation(h: np.ndarray, state: StateVector | DensityMatrix) -> float:
    h = np.asarray(h)
    if h.shape != (state.dim, state.dim):
        raise ValueError(f"operator of shape {h.shape} does not match dimension {state.dim}")
    if isinstance(state, StateVector):
        v = state.amplitudes
        return float(np.vdot(v, h @ v).real)
    return float(np.einsum("ij,ji->", h, state.matrix).real)


def random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    d = 1 << n_qubits
    return StateVector.normalized(rng.normal(size=d) + 1j * rng.normal(size=d))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
