"""Pauli strings, weighted Pauli sums and the Jordan-Wigner transform.

Letter ``q`` of a Pauli string acts on qubit ``q`` (so ``"ZXI"`` is
``Z_0 X_1``); matrices follow the least-significant-bit qubit order used in
:mod:`qautoenc.qstate`. Fermionic mode ``p`` maps to qubit ``p`` and an
occupied mode is ``|1>``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

PRUNE_TOL = 1e-14
_LETTERS = "IXYZ"

# (a, b) -> (phase, a*b) for single-qubit Paulis
_PRODUCT: dict[tuple[str, str], tuple[complex, str]] = {}
for _a in _LETTERS:
    _PRODUCT[("I", _a)] = (1, _a)
    _PRODUCT[(_a, "I")] = (1, _a)
    _PRODUCT[(_a, _a)] = (1, "I")
for _a, _b, _c in ("XYZ", "YZX", "ZXY"):
    _PRODUCT[(_a, _b)] = (1j, _c)
    _PRODUCT[(_b, _a)] = (-1j, _c)


@dataclass(frozen=True, order=True)
class PauliString:
    letters: str

    def __post_init__(self):
        if not self.letters or any(c not in _LETTERS for c in self.letters):
            raise ValueError(f"invalid Pauli string {self.letters!r}")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return self.letters

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls("I" * n_qubits)

    @classmethod
    def from_ops(cls, n_qubits: int, ops: Mapping[int, str]) -> PauliString:
        """``from_ops(4, {0: "Z", 2: "X"})`` -> ``"ZIXI"``."""
        letters = ["I"] * n_qubits
        for q, c in ops.items():
            letters[q] = c
        return cls("".join(letters))

    @property
    def masks(self) -> tuple[int, int, int]:
        """(x_mask, z_mask, number of Y letters)."""
        x = z = ny = 0
        for q, c in enumerate(self.letters):
            if c in "XY":
                x |= 1 << q
            if c in "ZY":
                z |= 1 << q
            ny += c == "Y"
        return x, z, ny

    def support(self) -> tuple[int, ...]:
        return tuple(q for q, c in enumerate(self.letters) if c != "I")


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Product ``a @ b`` as (phase in {+-1, +-i}, string)."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    phase = 1
    out = []
    for ca, cb in zip(a.letters, b.letters):
        ph, c = _PRODUCT[(ca, cb)]
        phase *= ph
        out.append(c)
    return complex(phase), PauliString("".join(out))


def pauli_to_matrix(ps: PauliString) -> np.ndarray:
    """Dense matrix of a Pauli string; P|b> = i^nY (-1)^popcount(b & z) |b ^ x>."""
    n = len(ps)
    x, z, ny = ps.masks
    idx = np.arange(1 << n)
    parity = np.zeros(idx.size, dtype=np.int64)
    zb = idx & z
    while np.any(zb):
        parity ^= zb & 1
        zb = zb >> 1
    m = np.zeros((1 << n, 1 << n), dtype=complex)
    m[idx ^ x, idx] = (1j**ny) * (1 - 2 * parity)
    return m


@dataclass
class PauliSum:
    """Weighted sum of equal-length Pauli strings.

    Terms are kept merged on construction; call :meth:`simplify` to drop
    negligible coefficients.
    """

    n_qubits: int
    terms: dict[PauliString, complex] = field(default_factory=dict)

    def __post_init__(self):
        merged: dict[PauliString, complex] = {}
        for ps, c in self.terms.items():
            ps = ps if isinstance(ps, PauliString) else PauliString(ps)
            if len(ps) != self.n_qubits:
                raise ValueError(f"term {ps} does not act on {self.n_qubits} qubits")
            merged[ps] = merged.get(ps, 0) + complex(c)
        self.terms = merged

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[tuple[complex, str | PauliString]]) -> PauliSum:
        """Build from a (coefficient, string) list; repeated strings are summed."""
        out = cls(n_qubits)
        for c, ps in terms:
            out.add_term(ps, c)
        return out

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> PauliSum:
        return cls(n_qubits, {PauliString.identity(n_qubits): coeff})

    def add_term(self, ps: str | PauliString, coeff: complex) -> None:
        ps = ps if isinstance(ps, PauliString) else PauliString(ps)
        if len(ps) != self.n_qubits:
            raise ValueError(f"term {ps} does not act on {self.n_qubits} qubits")
        self.terms[ps] = self.terms.get(ps, 0) + complex(coeff)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def copy(self) -> PauliSum:
        return PauliSum(self.n_qubits, dict(self.terms))

    def __add__(self, other: PauliSum) -> PauliSum:
        self._check(other)
        out = self.copy()
        for ps, c in other.terms.items():
            out.add_term(ps, c)
        return out

    def __sub__(self, other: PauliSum) -> PauliSum:
        return self + other * -1

    def __mul__(self, other) -> PauliSum:
        if isinstance(other, PauliSum):
            self._check(other)
            out = PauliSum(self.n_qubits)
            for pa, ca in self.terms.items():
                for pb, cb in other.terms.items():
                    ph, pc = multiply(pa, pb)
                    out.add_term(pc, ph * ca * cb)
            return out
        return PauliSum(self.n_qubits, {ps: c * other for ps, c in self.terms.items()})

    __rmul__ = __mul__

    def adjoint(self) -> PauliSum:
        return PauliSum(self.n_qubits, {ps: np.conj(c) for ps, c in self.terms.items()})

    def _check(self, other: PauliSum) -> None:
        if other.n_qubits != self.n_qubits:
            raise ValueError(f"register mismatch: {self.n_qubits} vs {other.n_qubits}")

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self.terms.values())

    def real_coefficients(self) -> dict[PauliString, float]:
        if not self.is_hermitian():
            raise ValueError("Pauli sum has complex coefficients")
        return {ps: c.real for ps, c in self.terms.items()}

    def to_matrix(self) -> np.ndarray:
        return pauli_sum_to_matrix(self)

    def to_text(self) -> str:
        return "".join(f"{c.real!r} {c.imag!r} {ps.letters}\n" for ps, c in sorted(self.terms.items()))

    @classmethod
    def from_text(cls, text: str, n_qubits: int | None = None) -> PauliSum:
        terms = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected '<re> <im> <letters>', got {line!r}")
            try:
                c = complex(float(parts[0]), float(parts[1]))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad coefficient") from exc
            terms.append((c, PauliString(parts[2])))
        if n_qubits is None:
            if not terms:
                raise ValueError("cannot infer register size from an empty term list")
            n_qubits = len(terms[0][1])
        return cls.from_terms(n_qubits, terms)


def simplify(h: PauliSum, tol: float = PRUNE_TOL) -> PauliSum:
    return PauliSum(h.n_qubits, {ps: c for ps, c in h.terms.items() if abs(c) >= tol})


def pauli_sum_to_matrix(h: PauliSum) -> np.ndarray:
    m = np.zeros((1 << h.n_qubits, 1 << h.n_qubits), dtype=complex)
    for ps, c in h.terms.items():
        m += c * pauli_to_matrix(ps)
    return m


@dataclass(frozen=True)
class FermionMonomial:
    """Coefficient times an ordered product of ladder operators.

    ``factors`` lists ``(mode, dagger)`` pairs left to right, so
    ``((0, True), (1, False))`` is ``a_0^dagger a_1``.
    """

    factors: tuple[tuple[int, bool], ...]
    coefficient: complex = 1.0

    def adjoint(self) -> FermionMonomial:
        return FermionMonomial(
            tuple((p, not d) for p, d in reversed(self.factors)), np.conj(self.coefficient)
        )


def jw_annihilation(p: int, n_modes: int) -> PauliSum:
    if not 0 <= p < n_modes:
        raise ValueError(f"mode {p} out of range for {n_modes} modes")
    z = "Z" * p
    rest = "I" * (n_modes - p - 1)
    return PauliSum(n_modes, {PauliString(z + "X" + rest): 0.5, PauliString(z + "Y" + rest): 0.5j})


def jw_creation(p: int, n_modes: int) -> PauliSum:
    return jw_annihilation(p, n_modes).adjoint()


def jw_monomial(m: FermionMonomial, n_modes: int) -> PauliSum:
    out = PauliSum.identity(n_modes, m.coefficient)
    for p, dagger in m.factors:
        op = jw_creation(p, n_modes) if dagger else jw_annihilation(p, n_modes)
        out = simplify(out * op)
    return out


def jw_sum(monomials: Sequence[FermionMonomial], n_modes: int) -> PauliSum:
    out = PauliSum(n_modes)
    for m in monomials:
        out = out + jw_monomial(m, n_modes)
    return simplify(out)
