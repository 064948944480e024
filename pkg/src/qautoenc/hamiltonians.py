"""Molecular and Hubbard Hamiltonians as Pauli sums, plus exact ground states.

Integral tables are read from files; nothing here evaluates molecular
integrals. Two-electron integrals use the physicist ordering
``h_pqrs = <pq|sr>`` so that ``H = h_nuc + sum h_pq a+_p a_q
+ 1/2 sum h_pqrs a+_p a+_q a_r a_s``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import InvalidData, MissingData
from .pauli import PauliString, PauliSum, jw_annihilation, jw_creation, simplify
from .qstate import StateVector

SYMMETRY_TOL = 1e-10
TWO_BODY_CONVENTION = "<pq|sr>"


@dataclass
class IntegralTable:
    n_spin_orbitals: int
    h_nuc: float
    h_pq: np.ndarray
    h_pqrs: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.n_spin_orbitals
        self.h_pq = np.asarray(self.h_pq, dtype=float)
        self.h_pqrs = np.asarray(self.h_pqrs, dtype=float)
        if self.h_pq.shape != (n, n) or self.h_pqrs.shape != (n,) * 4:
            raise InvalidData(
                f"integral shapes {self.h_pq.shape}, {self.h_pqrs.shape} do not match {n} spin orbitals"
            )

    def validate(self) -> None:
        """Raise InvalidData naming the first index tuple that breaks a symmetry."""
        bad = np.argwhere(np.abs(self.h_pq - self.h_pq.T) > SYMMETRY_TOL)
        if bad.size:
            p, q = bad[0]
            raise InvalidData(f"h_pq not symmetric at (p, q) = ({p}, {q})")
        g = self.h_pqrs
        # particle exchange <pq|sr> = <qp|rs>, and reality <pq|sr> = <sr|pq>
        for name, perm in (("h_pqrs != h_qpsr", (1, 0, 3, 2)), ("h_pqrs != h_srqp", (3, 2, 1, 0))):
            bad = np.argwhere(np.abs(g - g.transpose(perm)) > SYMMETRY_TOL)
            if bad.size:
                raise InvalidData(f"{name} at (p, q, r, s) = {tuple(int(i) for i in bad[0])}")

    def to_json(self) -> dict:
        return {
            "n_spin_orbitals": self.n_spin_orbitals,
            "convention": TWO_BODY_CONVENTION,
            "h_nuc": self.h_nuc,
            "h_pq": self.h_pq.tolist(),
            "h_pqrs": self.h_pqrs.tolist(),
            "metadata": self.metadata,
        }

    @classmethod
    def from_json(cls, data: dict) -> IntegralTable:
        try:
            conv = data.get("convention", TWO_BODY_CONVENTION)
            if conv != TWO_BODY_CONVENTION:
                raise InvalidData(f"unsupported two-electron convention {conv!r}")
            table = cls(
                n_spin_orbitals=int(data["n_spin_orbitals"]),
                h_nuc=float(data["h_nuc"]),
                h_pq=data["h_pq"],
                h_pqrs=data["h_pqrs"],
                metadata=dict(data.get("metadata", {})),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidData(f"malformed integral table: {exc}") from exc
        table.validate()
        return table


def load_integrals(path: str | Path) -> IntegralTable:
    path = Path(path)
    if not path.exists():
        raise MissingData(f"integral table {path} not found")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidData(f"{path}: {exc}") from exc
    return IntegralTable.from_json(data)


@lru_cache(maxsize=None)
def _ladder(p: int, n: int, dagger: bool) -> PauliSum:
    return jw_creation(p, n) if dagger else jw_annihilation(p, n)


def build_molecular(t: IntegralTable) -> PauliSum:
    t.validate()
    n = t.n_spin_orbitals
    h = PauliSum.identity(n, t.h_nuc)
    for p, q in zip(*np.nonzero(t.h_pq)):
        h = h + t.h_pq[p, q] * (_ladder(int(p), n, True) * _ladder(int(q), n, False))
    # a+_p a+_q products (and a_r a_s) are reused across many (r, s) / (p, q)
    creators: dict[tuple[int, int], PauliSum] = {}
    annihilators: dict[tuple[int, int], PauliSum] = {}
    acc: dict[PauliString, complex] = dict(h.terms)
    for p, q, r, s in zip(*np.nonzero(t.h_pqrs)):
        p, q, r, s = int(p), int(q), int(r), int(s)
        if p == q or r == s:
            continue
        if (p, q) not in creators:
            creators[p, q] = _ladder(p, n, True) * _ladder(q, n, True)
        if (r, s) not in annihilators:
            annihilators[r, s] = _ladder(r, n, False) * _ladder(s, n, False)
        term = creators[p, q] * annihilators[r, s]
        w = 0.5 * t.h_pqrs[p, q, r, s]
        for ps, c in term.terms.items():
            acc[ps] = acc.get(ps, 0) + w * c
    out = simplify(PauliSum(n, acc))
    if not out.is_hermitian():
        raise InvalidData("molecular Hamiltonian came out non-Hermitian")
    return PauliSum(n, {ps: c.real for ps, c in out.terms.items()})


@dataclass
class CoefficientHamiltonian:
    n_qubits: int
    terms: PauliSum
    metadata: dict = field(default_factory=dict)


def parse_coefficients(text: str) -> CoefficientHamiltonian:
    lines = text.splitlines()
    n_qubits = None
    metadata: dict = {}
    body = []
    for line in lines:
        stripped = line.strip()
        if stripped.startswith("#"):
            key, sep, value = stripped[1:].partition(":")
            if sep:
                metadata[key.strip()] = _coerce(value.strip())
            continue
        if n_qubits is None and stripped:
            parts = stripped.split()
            if len(parts) != 2 or parts[0] != "qubits":
                raise InvalidData(f"expected header 'qubits <n>', got {stripped!r}")
            try:
                n_qubits = int(parts[1])
            except ValueError as exc:
                raise InvalidData(f"bad qubit count {parts[1]!r}") from exc
            continue
        body.append(line)
    if n_qubits is None:
        raise InvalidData("missing 'qubits <n>' header")
    try:
        terms = PauliSum.from_text("\n".join(body), n_qubits)
    except ValueError as exc:
        raise InvalidData(str(exc)) from exc
    if not terms.terms:
        raise InvalidData("coefficient file has no terms")
    if not terms.is_hermitian():
        raise InvalidData("coefficient file has complex coefficients")
    terms = PauliSum(n_qubits, {ps: c.real for ps, c in terms.terms.items()})
    return CoefficientHamiltonian(n_qubits, terms, metadata)


def _coerce(value: str):
    try:
        return float(value)
    except ValueError:
        return value


def load_coefficients(path: str | Path) -> CoefficientHamiltonian:
    path = Path(path)
    if not path.exists():
        raise MissingData(f"coefficient file {path} not found")
    return parse_coefficients(path.read_text())


def write_coefficients(path: str | Path, h: PauliSum, metadata: Optional[dict] = None) -> None:
    header = f"qubits {h.n_qubits}\n"
    header += "".join(f"# {k}: {v}\n" for k, v in (metadata or {}).items())
    Path(path).write_text(header + h.to_text())


@dataclass(frozen=True)
class LatticeSpec:
    """``rows`` x ``cols`` sites, numbered row-major.

    Horizontal bonds wrap around each row when ``periodic_horizontal``;
    vertical bonds are open unless ``periodic_vertical``. A two-site ring
    contributes a single bond.
    """

    rows: int
    cols: int
    periodic_horizontal: bool = True
    periodic_vertical: bool = False

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("lattice needs at least one site")

    @property
    def n_sites(self) -> int:
        return self.rows * self.cols

    def site(self, row: int, col: int) -> int:
        return row * self.cols + col


def lattice_bonds(lat: LatticeSpec) -> list[tuple[int, int]]:
    bonds: set[tuple[int, int]] = set()

    def add(a: int, b: int):
        if a != b:
            bonds.add((min(a, b), max(a, b)))

    for r in range(lat.rows):
        for c in range(lat.cols):
            if c + 1 < lat.cols or lat.periodic_horizontal:
                add(lat.site(r, c), lat.site(r, (c + 1) % lat.cols))
            if r + 1 < lat.rows or lat.periodic_vertical:
                add(lat.site(r, c), lat.site((r + 1) % lat.rows, c))
    return sorted(bonds)


def hubbard_mode(site: int, spin: int) -> int:
    """Spin-orbital index; spin 0 is up, 1 is down."""
    return 2 * site + spin


def build_hubbard(lat: LatticeSpec, t: float, U: float) -> PauliSum:
    if not (math.isfinite(t) and math.isfinite(U)):
        raise ValueError("t and U must be finite")
    n = 2 * lat.n_sites
    h = PauliSum(n)
    for i, j in lattice_bonds(lat):
        for spin in (0, 1):
            a, b = hubbard_mode(i, spin), hubbard_mode(j, spin)
            hop = _ladder(a, n, True) * _ladder(b, n, False)
            h = h + (hop + hop.adjoint()) * (-t)
    for i in range(lat.n_sites):
        up, dn = hubbard_mode(i, 0), hubbard_mode(i, 1)
        n_up = _ladder(up, n, True) * _ladder(up, n, False)
        n_dn = _ladder(dn, n, True) * _ladder(dn, n, False)
        h = h + (n_up * n_dn) * U
    h = simplify(h)
    return PauliSum(n, {ps: c.real for ps, c in h.terms.items()})


def number_operator(n_modes: int) -> PauliSum:
    h = PauliSum.identity(n_modes, 0.5 * n_modes)
    for p in range(n_modes):
        h.add_term(PauliString.from_ops(n_modes, {p: "Z"}), -0.5)
    return h


def _popcount(idx: np.ndarray) -> np.ndarray:
    out = np.zeros_like(idx)
    while np.any(idx):
        out += idx & 1
        idx = idx >> 1
    return out


@dataclass(frozen=True, eq=False)
class GroundState:
    energy: float
    state: StateVector


def ground_state(h: PauliSum | np.ndarray, sector: Optional[int] = None) -> GroundState:
    """Lowest eigenpair, optionally inside the ``sector``-particle subspace.

    The returned vector has its largest-magnitude amplitude real positive.
    Within a degenerate level the eigensolver's first vector is returned.
    """
    m = h.to_matrix() if isinstance(h, PauliSum) else np.asarray(h, dtype=complex)
    if np.max(np.abs(m - m.conj().T)) > SYMMETRY_TOL:
        raise ValueError("Hamiltonian is not Hermitian")
    dim = m.shape[0]
    if sector is None:
        idx = np.arange(dim)
    else:
        idx = np.nonzero(_popcount(np.arange(dim)) == sector)[0]
        if idx.size == 0:
            raise ValueError(f"no basis states with {sector} particles")
    evals, evecs = np.linalg.eigh(m[np.ix_(idx, idx)])
    vec = np.zeros(dim, dtype=complex)
    vec[idx] = evecs[:, 0]
    k = int(np.argmax(np.abs(vec)))
    vec *= np.abs(vec[k]) / vec[k]
    vec /= np.linalg.norm(vec)
    return GroundState(float(evals[0]), StateVector(vec))


def compression_bound(n_modes: int, n_particles: int) -> float:
    """log2 of the dimension of the fixed-particle-number subspace."""
    if not 0 <= n_particles <= n_modes:
        raise ValueError("need 0 <= n_particles <= n_modes")
    return math.log2(math.comb(n_modes, n_particles))


# packaged fixtures

def data_dir() -> Path:
    return Path(str(resources.files("qautoenc") / "data"))


def fixture_path(system: str, geometry: float) -> Path:
    tag = {"h2": "r", "h4": "d"}[system]
    return data_dir() / system / f"{system}_{tag}{geometry:.4f}.json"


def coefficient_fixture_path(geometry: float) -> Path:
    return data_dir() / "h2_coefficients" / f"h2_r{geometry:.4f}.txt"


def molecular_hamiltonian(system: str, geometry: float) -> tuple[PauliSum, IntegralTable]:
    path = fixture_path(system, geometry)
    if not path.exists():
        raise MissingData(
            f"no {system} integral fixture at {path}; generate it with "
            f"'python scripts/make_fixtures.py --{system} {geometry}'"
        )
    table = load_integrals(path)
    return build_molecular(table), table
