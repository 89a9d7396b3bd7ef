import numpy as np
import pytest

ACCEPTANCE_LINES = []


def pdb_line(serial, name, resname, chain, seq, xyz, record="ATOM  ", altloc=" "):
    x, y, z = xyz
    return (f"{record}{serial:5d} {name:<4s}{altloc}{resname:>3s} {chain}{seq:4d}    "
            f"{x:8.3f}{y:8.3f}{z:8.3f}  1.00 20.00           {name[0]}")


def write_pdb(residues, extra_atoms=True):
    """residues: iterable of (chain, seq, (x, y, z)) for the CA atom."""
    lines, serial = [], 1
    for chain, seq, xyz in residues:
        if extra_atoms:
            lines.append(pdb_line(serial, "N", "ALA", chain, seq, np.add(xyz, (1.2, 0.3, 0.0))))
            serial += 1
        lines.append(pdb_line(serial, "CA", "ALA", chain, seq, xyz))
        serial += 1
        if extra_atoms:
            lines.append(pdb_line(serial, "C", "ALA", chain, seq, np.add(xyz, (-1.0, 0.9, 0.1))))
            serial += 1
    lines.append("END")
    return "\n".join(lines) + "\n"


def helix_dimer(n_per_chain=24, seed=0, gap=14.0):
    """Two helix-like chains a few Angstrom apart, with small coordinate noise."""
    rng = np.random.default_rng(seed)
    res = []
    for c, chain in enumerate("AB"):
        for i in range(n_per_chain):
            t = i * 100.0 * np.pi / 180.0
            xyz = (2.3 * np.cos(t) + c * gap, 2.3 * np.sin(t), 1.5 * i) + rng.normal(0, 0.2, 3)
            res.append((chain, i + 1, tuple(np.round(xyz, 3))))
    return res


@pytest.fixture
def three_residue_pdb():
    return write_pdb([("A", 1, (0.0, 0.0, 0.0)), ("A", 2, (0.0, 0.0, 5.0)), ("A", 3, (0.0, 0.0, 20.0))])


@pytest.fixture
def dimer_pdb(tmp_path):
    path = tmp_path / "dimer.pdb"
    path.write_text(write_pdb(helix_dimer()))
    return path


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
