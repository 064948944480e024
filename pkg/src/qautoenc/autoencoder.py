"""Quantum autoencoder: trash-state and round-trip costs, SWAP test, decoding.

An (n + k)-qubit register is split into latent qubits ``0 .. n-1`` and trash
qubits ``n .. n+k-1``. With that layout the amplitude vector of a state
reshapes to a ``(2**k, 2**n)`` matrix whose rows are indexed by the trash
configuration and columns by the latent one; every cost below is computed
from that matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .circuits import CircuitTemplate, apply_circuit, apply_gate, bind, check_params, gate_matrices, slot_matrix
from .pauli import PauliSum
from .qstate import DensityMatrix, StateVector, partial_trace, tensor

LOG_FLOOR = 1e-16
WEIGHT_TOL = 1e-12


@dataclass
class TrainingEnsemble:
    """Weighted pure states on ``n_latent + n_trash`` qubits plus a reference."""

    states: list[StateVector]
    weights: np.ndarray
    n_latent: int
    n_trash: int
    reference: StateVector
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.n_latent < 1 or self.n_trash < 1:
            raise ValueError("latent and trash registers need at least one qubit each")
        n = self.n_qubits
        if not self.states:
            raise ValueError("ensemble is empty")
        if any(s.n_qubits != n for s in self.states):
            raise ValueError(f"all states must have {n} qubits")
        if self.weights.shape != (len(self.states),):
            raise ValueError("need one weight per state")
        if np.any(self.weights < 0) or abs(self.weights.sum() - 1) > WEIGHT_TOL:
            raise ValueError("weights must be nonnegative and sum to 1")
        if self.reference.n_qubits != self.n_trash:
            raise ValueError(f"reference state must have {self.n_trash} qubits")

    @classmethod
    def uniform(cls, states: Sequence[StateVector], n_latent: int,
                reference: Optional[StateVector] = None, provenance: Optional[dict] = None) -> TrainingEnsemble:
        states = list(states)
        n_trash = states[0].n_qubits - n_latent
        if n_trash < 1:
            raise ValueError("latent register must be smaller than the input register")
        reference = reference if reference is not None else StateVector.zeros(n_trash)
        return cls(states, np.full(len(states), 1.0 / len(states)), n_latent, n_trash,
                   reference, dict(provenance or {}))

    @property
    def n_qubits(self) -> int:
        return self.n_latent + self.n_trash

    def batch(self) -> np.ndarray:
        """States as columns of a (2**(n+k), m) array."""
        return np.stack([s.amplitudes for s in self.states], axis=1)

    def subset(self, indices: Sequence[int]) -> TrainingEnsemble:
        w = self.weights[list(indices)]
        return TrainingEnsemble([self.states[i] for i in indices], w / w.sum(), self.n_latent,
                                self.n_trash, self.reference, dict(self.provenance))

    def to_json(self) -> dict:
        return {
            "n_latent": self.n_latent,
            "n_trash": self.n_trash,
            "reference": self.reference.to_json(),
            "weights": self.weights.tolist(),
            "states": [s.to_json() for s in self.states],
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, data: dict) -> TrainingEnsemble:
        return cls(
            states=[StateVector.from_json(s) for s in data["states"]],
            weights=data["weights"],
            n_latent=int(data["n_latent"]),
            n_trash=int(data["n_trash"]),
            reference=StateVector.from_json(data["reference"]),
            provenance=dict(data.get("provenance", {})),
        )


def _split(batch: np.ndarray, n_latent: int, n_trash: int) -> np.ndarray:
    """(2**(n+k), m) -> (m, 2**k, 2**n) trash-by-latent amplitude matrices."""
    return batch.T.reshape(batch.shape[1], 1 << n_trash, 1 << n_latent)


def trash_amplitudes(phi: np.ndarray, reference: np.ndarray, n_latent: int, n_trash: int):
    """Project encoded states onto the reference.

    Returns ``(v, infidelity)`` where ``v[i]`` is the unnormalized latent
    vector ``<a|_B U|psi_i>`` and ``infidelity[i] = 1 - <a|rho_B|a>``, the
    latter computed as the norm of the orthogonal remainder so it keeps full
    relative precision near zero.
    """
    m = _split(phi, n_latent, n_trash)
    v = np.einsum("t,itl->il", reference.conj(), m)
    rest = m - reference[None, :, None] * v[:, None, :]
    return v, np.einsum("itl,itl->i", rest.conj(), rest).real


def trash_state(u: np.ndarray, psi: StateVector, split: tuple[int, int]) -> DensityMatrix:
    n_latent, n_trash = split
    if n_latent + n_trash != psi.n_qubits or n_latent < 1 or n_trash < 1:
        raise ValueError(f"split {split} inconsistent with a {psi.n_qubits}-qubit state")
    u = np.asarray(u)
    if u.shape != (psi.dim, psi.dim):
        raise ValueError("unitary does not match the state dimension")
    phi = StateVector.normalized(u @ psi.amplitudes)
    return partial_trace(phi.density(), list(range(n_latent, n_latent + n_trash)))


def _encoded(p, tpl: CircuitTemplate, ens: TrainingEnsemble) -> np.ndarray:
    if tpl.n_qubits != ens.n_qubits:
        raise ValueError(f"template acts on {tpl.n_qubits} qubits, ensemble has {ens.n_qubits}")
    return apply_circuit(tpl, check_params(tpl, p), ens.batch())


def trash_infidelities(p, tpl: CircuitTemplate, ens: TrainingEnsemble) -> np.ndarray:
    _, infid = trash_amplitudes(_encoded(p, tpl, ens), ens.reference.amplitudes, ens.n_latent, ens.n_trash)
    return np.clip(infid, 0.0, 1.0)


def cost_c2(p, tpl: CircuitTemplate, ens: TrainingEnsemble) -> float:
    """Weighted trash-state fidelity with the reference."""
    c2 = 1.0 - float(np.dot(ens.weights, trash_infidelities(p, tpl, ens)))
    return min(1.0, max(0.0, c2))


def _roundtrip_fidelities(phi: np.ndarray, ens_like: TrainingEnsemble) -> np.ndarray:
    # F = <phi| rho_A (x) |a><a| |phi> = v^dag rho_A v with rho_A = M^T conj(M)
    m = _split(phi, ens_like.n_latent, ens_like.n_trash)
    v = np.einsum("t,itl->il", ens_like.reference.amplitudes.conj(), m)
    w = np.einsum("itl,il->it", m.conj(), v)
    return np.clip(np.einsum("it,it->i", w.conj(), w).real, 0.0, 1.0)


def cost_c1(p, tpl: CircuitTemplate, ens: TrainingEnsemble) -> float:
    """Weighted fidelity after compress, reset trash to the reference, decompress."""
    c1 = float(np.dot(ens.weights, _roundtrip_fidelities(_encoded(p, tpl, ens), ens)))
    return min(1.0, max(0.0, c1))


def objective(p, tpl: CircuitTemplate, ens: TrainingEnsemble) -> float:
    """log10(1 - C2 + 1e-16), the quantity minimized during training."""
    infid = float(np.dot(ens.weights, trash_infidelities(p, tpl, ens)))
    return math.log10(infid + LOG_FLOOR)


def swap_test_probability(a: StateVector, rho: DensityMatrix) -> float:
    """Probability of reading 0 on the ancilla of a simulated SWAP test.

    Register layout: ancilla qubit 0, ``rho`` on the next k qubits, ``a`` on
    the last k. Circuit: H(anc), controlled-SWAP, H(anc), measure anc.
    """
    if a.dim != rho.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {rho.dim}")
    k = a.n_qubits
    n = 2 * k + 1
    d = 1 << n
    idx = np.arange(d)
    mask = (1 << k) - 1
    anc = idx & 1
    x = (idx >> 1) & mask
    y = (idx >> (k + 1)) & mask
    swapped = anc | (y << 1) | (x << (k + 1))
    cswap = np.zeros((d, d))
    target = np.where(anc == 1, swapped, idx)
    cswap[target, idx] = 1.0
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    h_anc = np.kron(np.eye(d // 2), h)
    circuit = h_anc @ cswap @ h_anc
    sigma = np.kron(np.kron(np.outer(a.amplitudes, a.amplitudes.conj()), rho.matrix), np.diag([1.0, 0.0]))
    out = circuit @ sigma @ circuit.T
    return float(np.clip(out.diagonal()[anc == 0].real.sum(), 0.0, 1.0))


def swap_test(a: StateVector, rho: DensityMatrix, shots: Optional[int], seed=None) -> float:
    """Estimate <a|rho|a> from SWAP-test outcomes; ``shots=None`` gives the exact value.

    The estimator is 2 * (#zeros / shots) - 1, clamped to [0, 1].
    """
    p0 = swap_test_probability(a, rho)
    if shots is None:
        return float(np.clip(2 * p0 - 1, 0.0, 1.0))
    if shots < 1:
        raise ValueError("shots must be at least 1")
    zeros = np.random.default_rng(seed).binomial(shots, p0)
    return float(np.clip(2 * zeros / shots - 1, 0.0, 1.0))


@dataclass(frozen=True, eq=False)
class RoundTripResult:
    output: DensityMatrix
    fidelity: float
    energy: Optional[float] = None


def _hermitize(m: np.ndarray) -> np.ndarray:
    m = 0.5 * (m + m.conj().T)
    return m / np.trace(m).real


def roundtrip(p, tpl: CircuitTemplate, psi: StateVector, n_latent: int,
              reference: Optional[StateVector] = None, h: PauliSum | np.ndarray | None = None) -> RoundTripResult:
    """Compress, replace the trash with a fresh reference, decompress."""
    if psi.n_qubits != tpl.n_qubits:
        raise ValueError(f"state has {psi.n_qubits} qubits, template {tpl.n_qubits}")
    n_trash = tpl.n_qubits - n_latent
    if n_trash < 1 or n_latent < 1:
        raise ValueError("invalid latent size")
    reference = reference if reference is not None else StateVector.zeros(n_trash)
    if reference.n_qubits != n_trash:
        raise ValueError("reference size does not match the trash register")
    u = bind(tpl, p)
    phi = (u @ psi.amplitudes)[:, None]
    m = _split(phi, n_latent, n_trash)[0]
    rho_latent = m.T @ m.conj()
    a = reference.amplitudes
    sigma = np.kron(np.outer(a, a.conj()), rho_latent)
    out = DensityMatrix(_hermitize(u.conj().T @ sigma @ u))
    fid = float(np.clip(np.vdot(psi.amplitudes, out.matrix @ psi.amplitudes).real, 0.0, 1.0))
    energy = None
    if h is not None:
        hm = h.to_matrix() if isinstance(h, PauliSum) else np.asarray(h)
        energy = float(np.einsum("ij,ji->", hm, out.matrix).real)
    return RoundTripResult(out, fid, energy)


def latent_state(p, tpl: CircuitTemplate, psi: StateVector, n_latent: int) -> DensityMatrix:
    """Reduced state of the latent qubits after encoding."""
    phi = StateVector.normalized(bind(tpl, p) @ psi.amplitudes)
    return partial_trace(phi.density(), list(range(n_latent)))


def decode(p, tpl: CircuitTemplate, latent: StateVector, reference: StateVector) -> StateVector:
    """U^dagger (latent (x) reference)."""
    if latent.n_qubits + reference.n_qubits != tpl.n_qubits:
        raise ValueError("latent + reference size does not match the template register")
    u = bind(tpl, p)
    return StateVector.normalized(u.conj().T @ tensor(latent, reference).amplitudes)


class TrashObjective:
    """The training objective with slot-cached central finite differences.

    Calling the instance returns ``objective(p, tpl, ens)``. :meth:`fd_gradient`
    returns the same central differences as the generic routine in
    :mod:`qautoenc.optimize`, but reuses the circuit before and after the
    perturbed gate, so each probe costs one small gate and one matrix product.
    """

    def __init__(self, tpl: CircuitTemplate, ens: TrainingEnsemble):
        if tpl.n_qubits != ens.n_qubits:
            raise ValueError(f"template acts on {tpl.n_qubits} qubits, ensemble has {ens.n_qubits}")
        self.tpl = tpl
        self.ens = ens
        self._batch = ens.batch()
        self._ref = ens.reference.amplitudes
        self._w = ens.weights

    def _value(self, phi: np.ndarray) -> float:
        _, infid = trash_amplitudes(phi, self._ref, self.ens.n_latent, self.ens.n_trash)
        return math.log10(float(np.dot(self._w, np.clip(infid, 0.0, 1.0))) + LOG_FLOOR)

    def __call__(self, p) -> float:
        return self._value(apply_circuit(self.tpl, p, self._batch))

    def fd_gradient(self, p, h: float, lower: float, upper: float) -> tuple[np.ndarray, list[float]]:
        """Central differences, one-sided where a probe would leave [lower, upper].

        Returns ``(gradient, probe_values)``; ``probe_values`` lists every
        objective evaluation performed, in order.
        """
        tpl = self.tpl
        p = check_params(tpl, p)
        n = tpl.n_qubits
        gates = gate_matrices(tpl, p)
        prefixes = []
        cur = self._batch.astype(complex)
        for slot, g in zip(tpl.slots, gates):
            prefixes.append(cur)
            cur = apply_gate(cur, g, slot.qubits, n)
        f0 = self._value(cur)
        # suffix^dagger built by applying gate^dagger from the left
        suffix_dag = np.eye(1 << n, dtype=complex)
        suffixes: list[np.ndarray] = [None] * len(tpl.slots)
        for s in range(len(tpl.slots) - 1, -1, -1):
            suffixes[s] = suffix_dag.conj().T
            suffix_dag = apply_gate(suffix_dag, gates[s].conj().T, tpl.slots[s].qubits, n)

        grad = np.zeros(p.size)
        # f0 equals the caller's f(p); it is not re-recorded as a probe
        probes: list[float] = []
        for s, slot in enumerate(tpl.slots):
            if len(slot.qubits) <= 2:
                # output = sum_{a,c} gate[a, c] * blocks[a, c]; blocks are built once per slot
                rows = _local_rows(slot.qubits, n)
                d, r = rows.shape
                left = suffixes[s][:, rows].transpose(1, 0, 2).reshape(-1, r)
                right = prefixes[s][rows].transpose(1, 0, 2).reshape(r, -1)
                # one GEMM: (a, x) x (c, m) blocks
                blocks = (left @ right).reshape(d, -1, d, right.shape[1] // d).transpose(0, 2, 1, 3)

                def encoded(g, blocks=blocks):
                    return np.tensordot(g, blocks, axes=([0, 1], [0, 1]))
            else:
                def encoded(g, s=s, slot=slot):
                    return suffixes[s] @ apply_gate(prefixes[s], g, slot.qubits, n)

            def probe(q, slot=slot, encoded=encoded):
                val = self._value(encoded(slot_matrix(tpl, slot, q)))
                probes.append(val)
                return val

            for j in range(slot.param_offset, slot.param_offset + slot.param_arity):
                grad[j] = _central(probe, p, j, h, lower, upper, f0)
        return grad, probes


def _local_rows(qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    """Basis indices grouped by the slot-local index: row c lists, in ascending
    order, the register indices whose slot qubits spell c."""
    idx = np.arange(1 << n_qubits)
    local = np.zeros_like(idx)
    for j, q in enumerate(qubits):
        local |= ((idx >> q) & 1) << j
    return np.stack([idx[local == c] for c in range(1 << len(qubits))])


def _central(f, p: np.ndarray, j: int, h: float, lower: float, upper: float, f0: float) -> float:
    up_ok = p[j] + h <= upper
    dn_ok = p[j] - h >= lower
    if up_ok and dn_ok:
        q = p.copy()
        q[j] = p[j] + h
        fp = f(q)
        q[j] = p[j] - h
        return (fp - f(q)) / (2 * h)
    if up_ok:
        q = p.copy()
        q[j] = p[j] + h
        return (f(q) - f0) / h
    if dn_ok:
        q = p.copy()
        q[j] = p[j] - h
        return (f0 - f(q)) / h
    return 0.0
