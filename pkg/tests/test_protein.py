import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from conftest import helix_dimer, pdb_line, write_pdb
from mlnet.netgen import diag_edge_count_scale, offdiag_edge_count_scale
from mlnet.protein import (
    AnalysisError, LayerPartition, PDBParseError, ProteinStructure, Residue, ThresholdConfig, build_adjacency,
    count_columns, load_structure, parse_structure, scaled_protein_matrix, threshold_sweep,
)


def brute_adjacency(coords, labels, td, td_inter):
    n = len(coords)
    a = np.zeros((n, n))
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            d = math.dist(coords[x], coords[y])
            cut = td if labels[x] == labels[y] else td_inter
            a[x, y] = 1.0 if d < cut else 0.0
    return a


def structure_from(coords, chain="A"):
    return ProteinStructure([Residue(chain, i + 1, "", tuple(c)) for i, c in enumerate(coords)], "X")


class TestParse:
    def test_fixture(self, three_residue_pdb):
        s = parse_structure(three_residue_pdb)
        assert len(s) == 3 and s.skipped == 0
        np.testing.assert_allclose(s.coords, [[0, 0, 0], [0, 0, 5], [0, 0, 20]])
        assert s.chains == ["A", "A", "A"]

    def test_other_atom(self, three_residue_pdb):
        s = parse_structure(three_residue_pdb, atom="N")
        np.testing.assert_allclose(s.coords[0], [1.2, 0.3, 0.0])

    def test_first_model_only(self):
        text = ("MODEL        1\n" + write_pdb([("A", 1, (0, 0, 0))]).replace("END\n", "")
                + "ENDMDL\nMODEL        2\n" + write_pdb([("A", 2, (9, 9, 9))]))
        assert len(parse_structure(text)) == 1

    def test_altloc_and_hetatm(self):
        lines = [
            pdb_line(1, "CA", "ALA", "A", 1, (0, 0, 0), altloc="A"),
            pdb_line(2, "CA", "ALA", "A", 1, (5, 5, 5), altloc="B"),
            pdb_line(3, "CA", "ALA", "A", 2, (1, 1, 1), altloc="B"),
            pdb_line(4, "CA", "HOH", "W", 1, (3, 3, 3), record="HETATM"),
        ]
        s = parse_structure("\n".join(lines))
        assert len(s) == 1 and s.skipped == 1
        np.testing.assert_allclose(s.coords[0], [0, 0, 0])

    def test_insertion_codes_distinct(self):
        a = pdb_line(1, "CA", "ALA", "A", 5, (0, 0, 0))
        b = pdb_line(2, "CA", "ALA", "A", 5, (4, 0, 0))
        b = b[:26] + "A" + b[27:]
        assert len(parse_structure(a + "\n" + b)) == 2

    def test_short_line(self):
        bad = write_pdb([("A", 1, (0, 0, 0))]) + "ATOM      9  CA  ALA A   2       1.0\n"
        with pytest.raises(PDBParseError, match="line 5"):
            parse_structure(bad)

    def test_bad_number(self):
        line = pdb_line(1, "CA", "ALA", "A", 1, (0, 0, 0))
        line = line[:30] + "  abc.de" + line[38:]
        with pytest.raises(PDBParseError, match="line 1"):
            parse_structure(line)

    def test_empty(self):
        with pytest.raises(PDBParseError, match="no residues"):
            parse_structure("HEADER    nothing\nEND\n")

    def test_load(self, dimer_pdb):
        s = load_structure(dimer_pdb)
        assert len(s) == 48 and s.source_id == "DIMER"


class TestPartition:
    def test_by_chain(self, dimer_pdb):
        p = LayerPartition("by_chain").resolve(load_structure(dimer_pdb))
        assert p.blocks == [(0, 24), (24, 48)]

    def test_by_count(self, dimer_pdb):
        p = LayerPartition("by_count", sizes=[10, 38]).resolve(load_structure(dimer_pdb))
        assert p.block_sizes == [10, 38]
        with pytest.raises(AnalysisError):
            LayerPartition("by_count", sizes=[10, 10]).resolve(load_structure(dimer_pdb))

    @pytest.mark.parametrize("ranges", [[[0, 20], [21, 48]], [[0, 48], [48, 48]], [[1, 48]]])
    def test_explicit_invalid(self, dimer_pdb, ranges):
        with pytest.raises(AnalysisError):
            LayerPartition("explicit", ranges=ranges).resolve(load_structure(dimer_pdb))


class TestAdjacency:
    def test_single_edge(self, three_residue_pdb):
        s = parse_structure(three_residue_pdb)
        adj = build_adjacency(s, LayerPartition("by_chain"), ThresholdConfig(6.0, 6.0))
        expected = np.zeros((3, 3))
        expected[0, 1] = expected[1, 0] = 1
        np.testing.assert_array_equal(adj.entries, expected)
        assert adj.edge_counts == {(0, 0): 1}

    def test_strict_threshold(self, three_residue_pdb):
        s = parse_structure(three_residue_pdb)
        adj = build_adjacency(s, LayerPartition("by_chain"), ThresholdConfig(5.0, 5.0))
        assert adj.edge_counts[(0, 0)] == 0

    def test_split_counts(self, three_residue_pdb):
        s = parse_structure(three_residue_pdb)
        part = LayerPartition("explicit", ranges=[[0, 1], [1, 3]])
        adj = build_adjacency(s, part, ThresholdConfig(6.0, 6.0))
        assert adj.edge_counts == {(0, 0): 0, (1, 1): 0, (0, 1): 1}
        adj = build_adjacency(s, part, ThresholdConfig(16.0, 4.0))
        assert adj.edge_counts == {(0, 0): 0, (1, 1): 1, (0, 1): 0}

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 50), cut=st.integers(1, 49),
           td=st.floats(0.5, 15), td_inter=st.floats(0.5, 15))
    def test_brute_force_oracle(self, seed, n, cut, td, td_inter):
        coords = np.random.default_rng(seed).uniform(0, 20, (n, 3))
        cut = min(cut, n - 1)
        part = LayerPartition("explicit", ranges=[[0, cut], [cut, n]])
        adj = build_adjacency(structure_from(coords), part, ThresholdConfig(td, td_inter))
        labels = [0] * cut + [1] * (n - cut)
        np.testing.assert_array_equal(adj.entries, brute_adjacency(coords, labels, td, td_inter))
        total = int(np.triu(adj.entries, 1).sum())
        assert sum(adj.edge_counts.values()) == total

    def test_monotone_in_threshold(self):
        s = parse_structure(write_pdb(helix_dimer(30, seed=1)))
        part = LayerPartition("by_chain")
        prev = None
        for t in (4.0, 6.0, 8.0, 12.0, 20.0):
            counts = build_adjacency(s, part, ThresholdConfig(t, t)).edge_counts
            if prev:
                assert all(counts[key] >= prev[key] for key in counts)
            prev = counts

    def test_rigid_motion_invariance(self):
        res = helix_dimer(20, seed=2)
        s = parse_structure(write_pdb(res))
        rot = Rotation.from_euler("xyz", [0.3, -1.1, 2.0]).as_matrix()
        moved = structure_from(s.coords @ rot.T + [10.0, -3.0, 7.5])
        moved.residues = [Residue(r.chain, r.seq, "", tuple(c)) for r, c in zip(s.residues, moved.coords)]
        cfg = ThresholdConfig(7.0, 9.0)
        a = build_adjacency(s, LayerPartition("by_chain"), cfg)
        b = build_adjacency(moved, LayerPartition("by_chain"), cfg)
        assert a.edge_counts == b.edge_counts


class TestScaling:
    def test_edge_count_factors(self, dimer_pdb):
        s = load_structure(dimer_pdb)
        adj = build_adjacency(s, LayerPartition("by_chain"), ThresholdConfig(7.0, 16.0))
        scaled = scaled_protein_matrix(adj)
        e = adj.edge_counts
        assert scaled.scales[(0, 0)] == pytest.approx(diag_edge_count_scale(24, e[(0, 0)]))
        assert scaled.scales[(0, 1)] == pytest.approx(offdiag_edge_count_scale(24, 24, e[(0, 1)]))
        np.testing.assert_array_equal(scaled.entries, scaled.entries.T)

    def test_empty_block_skipped(self, dimer_pdb):
        s = load_structure(dimer_pdb)
        adj = build_adjacency(s, LayerPartition("by_chain"), ThresholdConfig(7.0, 1.0))
        scaled = scaled_protein_matrix(adj)
        assert scaled.skipped == ((0, 1),)
        assert not scaled.block(0, 1).any()

    def test_all_degenerate(self, three_residue_pdb):
        s = parse_structure(three_residue_pdb)
        adj = build_adjacency(s, LayerPartition("by_chain"), ThresholdConfig(1.0, 1.0))
        with pytest.raises(AnalysisError):
            scaled_protein_matrix(adj)


class TestSweep:
    def test_count_columns(self):
        assert count_columns([5, 5, 5]) == ["n1", "n2", "n3", "n12", "n13", "n23"]

    def test_joint(self, dimer_pdb):
        s = load_structure(dimer_pdb)
        sweep = threshold_sweep(s, LayerPartition("by_chain"), "joint", [8.0, 6.0, 12.0], k_orders=(1, 2))
        assert sweep.axis == "td" and [p.value for p in sweep.points] == [6.0, 8.0, 12.0]
        rows = list(sweep.rows())
        assert len(rows) == 6
        assert {"td", "td_inter", "n1", "n2", "n12", "alpha_hat", "ks_distance"} <= set(rows[0])
        assert rows[0]["n12"] <= rows[-1]["n12"]

    def test_inter_only(self, dimer_pdb):
        s = load_structure(dimer_pdb)
        sweep = threshold_sweep(s, LayerPartition("by_chain"), "inter_only", [10.0, 15.0], td=7.0)
        assert sweep.axis == "td_inter"
        assert all(p.extra["td"] == 7.0 for p in sweep.points)
        assert sweep.points[0].extra["n1"] == sweep.points[1].extra["n1"]

    def test_mode_errors(self, dimer_pdb):
        s = load_structure(dimer_pdb)
        with pytest.raises(ValueError):
            threshold_sweep(s, LayerPartition("by_chain"), "inter_only", [10.0])
        with pytest.raises(ValueError):
            threshold_sweep(s, LayerPartition("by_chain"), "both", [10.0])
        with pytest.raises(ValueError):
            ThresholdConfig(0.0, 1.0)

    def test_degenerate_point_does_not_abort(self, dimer_pdb):
        # at 8 A the two chains give identical graphs, so every level is doubled
        s = load_structure(dimer_pdb)
        sweep = threshold_sweep(s, LayerPartition("by_chain"), "joint", [6.0, 8.0], k_orders=(1,))
        bad = sweep.points[1].fits[1]
        assert bad.degenerate and np.isnan(bad.alpha_hat)
        assert not np.isnan(sweep.points[0].fits[1].alpha_hat)
