"""Parameterized circuit templates and their unitary realization.

A k-qubit gate acting on slot qubits ``(q_0, ..., q_{k-1})`` is written in the
local basis ``|b_0 + 2 b_1 + ...>``, i.e. the slot's first qubit is the local
least-significant bit, matching the register convention of
:mod:`qautoenc.qstate`.

Parameters are plain float arrays (radians). Training keeps them inside
``[0, 4*pi)``; binding accepts any real values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .pauli import PauliString, PauliSum, pauli_to_matrix

SINGLE = "single-rotation"
CONTROLLED = "controlled-rotation"
TWO_QUBIT = "two-qubit-general"
PAULI_EXP = "pauli-exponential"

ARITY = {SINGLE: 3, CONTROLLED: 3, TWO_QUBIT: 15}

_P0 = np.diag([1.0, 0.0]).astype(complex)
_P1 = np.diag([0.0, 1.0]).astype(complex)
_I2 = np.eye(2, dtype=complex)


def rot_zyz(t1: float, t2: float, t3: float) -> np.ndarray:
    """R_z(t1) R_y(t2) R_z(t3) with R_z(a) = diag(e^{-ia/2}, e^{ia/2})."""
    c, s = np.cos(t2 / 2), np.sin(t2 / 2)
    ep = np.exp(-0.5j * (t1 + t3))
    em = np.exp(-0.5j * (t1 - t3))
    return np.array([[ep * c, -em * s], [np.conj(em) * s, np.conj(ep) * c]])


def canonical_gate(a: float, b: float, c: float) -> np.ndarray:
    """exp(-i (a XX + b YY + c ZZ)), closed form on the {00,11} and {01,10} blocks."""
    u = np.zeros((4, 4), dtype=complex)
    e1, e2 = np.exp(-1j * c), np.exp(1j * c)
    cm, sm = np.cos(a - b), np.sin(a - b)
    cp, sp = np.cos(a + b), np.sin(a + b)
    u[0, 0] = u[3, 3] = e1 * cm
    u[0, 3] = u[3, 0] = -1j * e1 * sm
    u[1, 1] = u[2, 2] = e2 * cp
    u[1, 2] = u[2, 1] = -1j * e2 * sp
    return u


def local_kron(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Operator with ``first`` on the slot's first qubit and ``second`` on its second."""
    # same as np.kron(second, first) without the generic overhead
    return (second[:, None, :, None] * first[None, :, None, :]).reshape(4, 4)


def two_qubit_general(params: Sequence[float]) -> np.ndarray:
    """15-parameter two-qubit gate (A1 x A2) . exp(-i(aXX+bYY+cZZ)) . (B1 x B2).

    Layout: ``params[0:3]`` B1, ``[3:6]`` B2, ``[6:9]`` (a, b, c), ``[9:12]`` A1,
    ``[12:15]`` A2; every local factor is a ZYZ rotation.
    """
    p = np.asarray(params, dtype=float)
    if p.shape != (15,):
        raise ValueError(f"two-qubit gate takes 15 parameters, got {p.size}")
    before = local_kron(rot_zyz(*p[0:3]), rot_zyz(*p[3:6]))
    after = local_kron(rot_zyz(*p[9:12]), rot_zyz(*p[12:15]))
    return after @ canonical_gate(*p[6:9]) @ before


def controlled_rotation(params: Sequence[float]) -> np.ndarray:
    """Apply rot_zyz to the slot's second qubit when the first is |1>."""
    return local_kron(_P0, _I2) + local_kron(_P1, rot_zyz(*params))


@dataclass(frozen=True)
class GateSlot:
    kind: str
    qubits: tuple[int, ...]
    param_offset: int
    param_arity: int

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "qubits": list(self.qubits),
            "param_offset": self.param_offset,
            "param_arity": self.param_arity,
        }


@dataclass(frozen=True)
class CircuitTemplate:
    kind: str  # "A", "B" or "hamiltonian"
    n_qubits: int
    cells: int
    slots: tuple[GateSlot, ...]
    # Pauli terms of a Hamiltonian-ansatz template, empty otherwise
    terms: tuple[tuple[float, PauliString], ...] = field(default=())

    @property
    def param_count(self) -> int:
        return sum(s.param_arity for s in self.slots)

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "n_qubits": self.n_qubits,
            "cells": self.cells,
            "param_count": self.param_count,
            "slots": [s.to_json() for s in self.slots],
        }
        if self.terms:
            out["terms"] = [[c, ps.letters] for c, ps in self.terms]
        return out

    @classmethod
    def from_json(cls, data: dict) -> CircuitTemplate:
        kind = data["kind"]
        if kind == "A":
            tpl = template_a(data["n_qubits"], data["cells"])
        elif kind == "B":
            tpl = template_b(data["n_qubits"], data["cells"])
        elif kind == "hamiltonian":
            h = PauliSum.from_terms(data["n_qubits"], [(c, s) for c, s in data["terms"]])
            tpl = template_hamiltonian(h)
        else:
            raise ValueError(f"unknown template kind {kind!r}")
        if tpl.param_count != data.get("param_count", tpl.param_count):
            raise ValueError("template descriptor parameter count is inconsistent")
        return tpl


def _check_register(n_qubits: int, cells: int) -> None:
    if n_qubits < 2:
        raise ValueError("templates need at least two qubits")
    if cells < 1:
        raise ValueError("templates need at least one unit cell")


def template_a(n_qubits: int, cells: int = 1) -> CircuitTemplate:
    """A general two-qubit gate on every qubit pair, pairs in lexicographic order."""
    _check_register(n_qubits, cells)
    slots = []
    offset = 0
    for _ in range(cells):
        for i in range(n_qubits):
            for j in range(i + 1, n_qubits):
                slots.append(GateSlot(TWO_QUBIT, (i, j), offset, 15))
                offset += 15
    return CircuitTemplate("A", n_qubits, cells, tuple(slots))


def template_b(n_qubits: int, cells: int = 1) -> CircuitTemplate:
    """Single rotations, all controlled rotations (control-major), single rotations."""
    _check_register(n_qubits, cells)
    slots = []
    offset = 0

    def add(kind, qubits):
        nonlocal offset
        slots.append(GateSlot(kind, qubits, offset, 3))
        offset += 3

    for _ in range(cells):
        for q in range(n_qubits):
            add(SINGLE, (q,))
        for c in range(n_qubits):
            for t in range(n_qubits):
                if t != c:
                    add(CONTROLLED, (c, t))
        for q in range(n_qubits):
            add(SINGLE, (q,))
    return CircuitTemplate("B", n_qubits, cells, tuple(slots))


def template_hamiltonian(terms: PauliSum) -> CircuitTemplate:
    """exp(-i sum_j alpha_j c_j P_j) with one angle per Pauli term."""
    if not terms.is_hermitian():
        raise ValueError("Hamiltonian-ansatz terms must have real coefficients")
    pairs = tuple((c.real, ps) for ps, c in sorted(terms.terms.items()))
    if not pairs:
        raise ValueError("Hamiltonian ansatz needs at least one term")
    n = terms.n_qubits
    slot = GateSlot(PAULI_EXP, tuple(range(n)), 0, len(pairs))
    return CircuitTemplate("hamiltonian", n, 1, (slot,), pairs)


def slot_matrix(tpl: CircuitTemplate, slot: GateSlot, params: np.ndarray) -> np.ndarray:
    p = params[slot.param_offset: slot.param_offset + slot.param_arity]
    if slot.kind == TWO_QUBIT:
        return two_qubit_general(p)
    if slot.kind == SINGLE:
        return rot_zyz(*p)
    if slot.kind == CONTROLLED:
        return controlled_rotation(p)
    if slot.kind == PAULI_EXP:
        gen = sum(a * c * pauli_to_matrix(ps) for a, (c, ps) in zip(p, tpl.terms))
        w, v = np.linalg.eigh(gen)
        return (v * np.exp(-1j * w)) @ v.conj().T
    raise ValueError(f"unknown slot kind {slot.kind!r}")


def apply_gate(batch: np.ndarray, gate: np.ndarray, qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    """Apply a local gate to each column of a (2**n, m) array."""
    k = len(qubits)
    m = batch.shape[1]
    t = batch.reshape((2,) * n_qubits + (m,))
    # gate tensor axes: (out_{k-1} .. out_0, in_{k-1} .. in_0)
    g = gate.reshape((2,) * (2 * k))
    axes = [n_qubits - 1 - q for q in reversed(qubits)]
    out = np.tensordot(g, t, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return out.reshape(batch.shape)


def check_params(tpl: CircuitTemplate, params) -> np.ndarray:
    p = np.asarray(params, dtype=float).reshape(-1)
    if p.size != tpl.param_count:
        raise ValueError(f"template needs {tpl.param_count} parameters, got {p.size}")
    return p


def gate_matrices(tpl: CircuitTemplate, params) -> list[np.ndarray]:
    p = check_params(tpl, params)
    return [slot_matrix(tpl, s, p) for s in tpl.slots]


def apply_circuit(tpl: CircuitTemplate, params, batch: np.ndarray) -> np.ndarray:
    """U(params) applied to each column of ``batch``."""
    out = np.asarray(batch, dtype=complex)
    for slot, g in zip(tpl.slots, gate_matrices(tpl, params)):
        out = apply_gate(out, g, slot.qubits, tpl.n_qubits)
    return out


def bind(tpl: CircuitTemplate, params) -> np.ndarray:
    """Full 2**n x 2**n unitary, slots applied in template order."""
    return apply_circuit(tpl, params, np.eye(1 << tpl.n_qubits, dtype=complex))


def embed(gate: np.ndarray, qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    return apply_gate(np.eye(1 << n_qubits, dtype=complex), gate, qubits, n_qubits)


def make_template(kind: str, n_qubits: int, cells: int = 1, terms: PauliSum | None = None) -> CircuitTemplate:
    kind_u = kind.upper()
    if kind_u == "A":
        return template_a(n_qubits, cells)
    if kind_u == "B":
        return template_b(n_qubits, cells)
    if kind.lower() in ("hamiltonian", "hamiltonian-ansatz"):
        if terms is None:
            raise ValueError("Hamiltonian ansatz needs Pauli terms")
        return template_hamiltonian(terms)
    raise ValueError(f"unknown circuit kind {kind!r}")
