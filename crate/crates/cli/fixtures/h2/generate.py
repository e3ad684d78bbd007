"""Regenerate the H2 / cc-pVDZ FCIDUMP fixtures and MANIFEST.

Requires pyscf. Writes one FCIDUMP per bond length over the RHF canonical
orbitals, plus MANIFEST with the pyscf RHF and FCI reference energies.
"""
import numpy as np
import pyscf
from pyscf import gto, scf, fci, ao2mo
from pyscf.tools import fcidump

BOND_LENGTHS = [0.50, 0.75, 1.00, 1.25, 1.50, 1.75, 2.00, 2.25, 2.50, 2.75, 3.00]

rows = []
for r in BOND_LENGTHS:
    mol = gto.M(atom=f"H 0 0 0; H 0 0 {r}", basis="cc-pvdz", unit="Angstrom",
                symmetry=False, verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    e_hf = mf.kernel()
    assert mf.converged
    name = f"h2_R{r:.2f}.FCIDUMP"
    fcidump.from_scf(mf, name, tol=1e-15)
    cis = fci.FCI(mf)
    cis.conv_tol = 1e-12
    e_fci, civec = cis.kernel()
    # reference correlation measures: natural spatial orbitals of the
    # spin-summed 1RDM, nonfreeness over spin-orbitals, and the CI entropy
    # of the FCI vector rotated into that natural basis
    occ, nat = np.linalg.eigh(cis.make_rdm1(civec, mol.nao, 2) / 2)
    occ = np.clip(occ, 0.0, 1.0)
    inner = occ[(occ > 1e-15) & (occ < 1 - 1e-15)]
    nonfree = 2 * float(np.sum(-inner * np.log2(inner) - (1 - inner) * np.log2(1 - inner)))
    w = (nat.T @ civec @ nat).ravel() ** 2
    w = w[w > 1e-16]
    h_nat = float(-(w * np.log2(w)).sum())
    rows.append((name, r, e_hf, e_fci, nonfree, h_nat))

with open("MANIFEST", "w") as f:
    f.write(f"# H2 cc-pVDZ, RHF canonical orbitals, 2 electrons in 10 orbitals\n")
    f.write(f"# generated by generate.py with pyscf {pyscf.__version__}\n")
    f.write("# file,R_angstrom,e_rhf,e_fci,nonfreeness_bits,ci_entropy_natural_bits\n")
    for name, r, e_hf, e_fci, nonfree, h_nat in rows:
        f.write(f"{name},{r:.2f},{e_hf:.12f},{e_fci:.12f},{nonfree:.10f},{h_nat:.10f}\n")
