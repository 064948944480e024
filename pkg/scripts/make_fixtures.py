"""Generate molecular integral tables with PySCF.

This is the external electronic-structure step: it runs restricted
Hartree-Fock in STO-6G, transforms the integrals to the spin-orbital basis
(spin orbital ``p = 2*spatial + spin``) and writes IntegralTable JSON files
plus H2 Pauli coefficient files into ``src/qautoenc/data``. The package never
imports PySCF; rerun this only to regenerate or extend the fixtures.

    python scripts/make_fixtures.py            # default H2 + H4 grids
    python scripts/make_fixtures.py --h2 0.8 1.1 --no-h4
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np
from pyscf import ao2mo, fci, gto, scf

from qautoenc.hamiltonians import IntegralTable, build_molecular, fixture_path
from qautoenc.presets import H2_EXTRA_POINTS, H2_TEST_GRID, H2_TRAIN_GRID, H4_TRAIN_GRID

DATA = Path(__file__).resolve().parents[1] / "src" / "qautoenc" / "data"
H4_BOND_BOHR = 2.0
ZERO_CUTOFF = 1e-12


def _fix_mo_signs(c: np.ndarray) -> np.ndarray:
    # largest-magnitude AO coefficient of each MO made positive
    idx = np.argmax(np.abs(c), axis=0)
    return c * np.sign(c[idx, np.arange(c.shape[1])])


def integral_table(atom: str, unit: str, system: str, geometry: dict) -> IntegralTable:
    mol = gto.M(atom=atom, basis="sto-6g", unit=unit, verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.max_cycle = 200
    mf.kernel()
    if not mf.converged:
        mf = scf.newton(mf).run()
    c = _fix_mo_signs(mf.mo_coeff)
    nmo = c.shape[1]
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), nmo)  # chemist (ij|kl)
    e_fci, _ = fci.FCI(mf).kernel()

    n = 2 * nmo
    h_pq = np.zeros((n, n))
    h_pqrs = np.zeros((n, n, n, n))
    for p in range(n):
        for q in range(n):
            if p % 2 == q % 2:
                h_pq[p, q] = h1[p // 2, q // 2]
    # <pq|sr> = (ps|qr) with spin(p) = spin(s), spin(q) = spin(r)
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    if p % 2 == s % 2 and q % 2 == r % 2:
                        h_pqrs[p, q, r, s] = eri[p // 2, s // 2, q // 2, r // 2]
    h_pq[np.abs(h_pq) < ZERO_CUTOFF] = 0.0
    h_pqrs[np.abs(h_pqrs) < ZERO_CUTOFF] = 0.0
    h_pq = 0.5 * (h_pq + h_pq.T)
    return IntegralTable(
        n_spin_orbitals=n,
        h_nuc=float(mol.energy_nuc()),
        h_pq=h_pq,
        h_pqrs=h_pqrs,
        metadata={
            "system": system,
            "geometry": geometry,
            "reference_energy": float(e_fci),
            "hf_energy": float(mf.e_tot),
            "basis": "sto-6g",
            "provenance": "PySCF RHF + FCI, spin orbital p = 2*spatial + spin",
        },
    )


def write_h2(r: float) -> None:
    table = integral_table(f"H 0 0 0; H 0 0 {r}", "Angstrom", "h2", {"r_angstrom": r})
    path = fixture_path("h2", r)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(table.to_json(), indent=1))
    ham = build_molecular(table)
    coeff = DATA / "h2_coefficients" / f"h2_r{r:.4f}.txt"
    coeff.parent.mkdir(parents=True, exist_ok=True)
    header = (
        f"qubits {ham.n_qubits}\n"
        f"# system: h2\n# r_angstrom: {r!r}\n"
        f"# reference_energy: {table.metadata['reference_energy']!r}\n"
    )
    coeff.write_text(header + ham.to_text())
    print(f"h2 r={r:.4f}  E_fci={table.metadata['reference_energy']:.10f}")


def write_h4(d: float) -> None:
    b = H4_BOND_BOHR
    atom = f"H 0 0 0; H {b} 0 0; H 0 {d} 0; H {b} {d} 0"
    table = integral_table(atom, "Bohr", "h4", {"d_bohr": d, "bond_bohr": b})
    path = fixture_path("h4", d)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(table.to_json(), indent=1))
    print(f"h4 d={d:.4f}  E_fci={table.metadata['reference_energy']:.10f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--h2", type=float, nargs="*", help="H2 bond lengths (Angstrom)")
    ap.add_argument("--h4", type=float, nargs="*", help="H4 separations d (bohr)")
    ap.add_argument("--no-h4", action="store_true")
    args = ap.parse_args()

    h2 = args.h2 if args.h2 else sorted(set(H2_TRAIN_GRID) | set(H2_TEST_GRID) | set(H2_EXTRA_POINTS))
    for r in h2:
        write_h2(r)
    if not args.no_h4:
        for d in args.h4 if args.h4 else H4_TRAIN_GRID:
            write_h4(d)


if __name__ == "__main__":
    main()
