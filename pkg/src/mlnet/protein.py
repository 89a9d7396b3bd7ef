"""Residue distance networks from PDB coordinate files."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .ensemble import SweepPoint, SweepResult, summarize
from .netgen import BlockMatrix, edge_count_scale_factors, offdiag_pairs, partition_of
from .spectral import eigenvalues, spacing_ratios

log = logging.getLogger(__name__)


class PDBParseError(ValueError):
    pass


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class Residue:
    chain: str
    seq: int
    icode: str
    coord: tuple


@dataclass
class ProteinStructure:
    residues: list
    source_id: str = ""
    skipped: int = 0

    def __len__(self):
        return len(self.residues)

    @property
    def coords(self) -> np.ndarray:
        return np.array([r.coord for r in self.residues], dtype=float).reshape(-1, 3)

    @property
    def chains(self) -> list:
        return [r.chain for r in self.residues]


def parse_structure(data, atom: str = "CA", source_id: str = "") -> ProteinStructure:
    """Read one coordinate per residue from legacy fixed-column PDB text.

    Only ATOM records of the first MODEL are used; alternate locations other
    than blank or 'A' are ignored.  Residues without the selected atom are
    skipped and counted.
    """
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("latin-1")
    seen, picked = {}, {}
    for lineno, line in enumerate(data.splitlines(), start=1):
        rec = line[:6]
        if rec.startswith("ENDMDL"):
            break
        if rec != "ATOM  ":
            continue
        if len(line) < 54:
            raise PDBParseError(f"line {lineno}: ATOM record shorter than 54 columns")
        try:
            name = line[12:16].strip()
            altloc = line[16]
            chain = line[21]
            seq = int(line[22:26])
            icode = line[26].strip()
            xyz = (float(line[30:38]), float(line[38:46]), float(line[46:54]))
        except ValueError as exc:
            raise PDBParseError(f"line {lineno}: malformed fixed columns ({exc})") from None
        if not np.all(np.isfinite(xyz)):
            raise PDBParseError(f"line {lineno}: non-finite coordinate")
        key = (chain, seq, icode)
        seen.setdefault(key, None)
        if altloc not in (" ", "A") or name != atom or key in picked:
            continue
        picked[key] = Residue(chain, seq, icode, xyz)
    residues = [picked[k] for k in seen if k in picked]
    if not residues:
        raise PDBParseError(f"no residues with atom {atom!r} found")
    skipped = len(seen) - len(residues)
    if skipped:
        log.warning("%s: %d residues lack atom %s", source_id or "structure", skipped, atom)
    return ProteinStructure(residues, source_id, skipped)


def load_structure(path, atom: str = "CA") -> ProteinStructure:
    path = Path(path)
    return parse_structure(path.read_bytes(), atom=atom, source_id=path.stem.upper())


@dataclass
class LayerPartition:
    mode: str
    sizes: Optional[list] = None
    ranges: Optional[list] = None
    blocks: list = field(default_factory=list)

    def resolve(self, structure: ProteinStructure) -> "LayerPartition":
        n = len(structure)
        if self.mode == "by_chain":
            blocks, start = [], 0
            chains = structure.chains
            for i in range(1, n + 1):
                if i == n or chains[i] != chains[i - 1]:
                    blocks.append((start, i))
                    start = i
        elif self.mode == "by_count":
            if not self.sizes or sum(self.sizes) != n:
                raise AnalysisError(f"block sizes {self.sizes} do not sum to {n} residues")
            ends = np.cumsum(self.sizes)
            blocks = [(int(e - s), int(e)) for s, e in zip(self.sizes, ends)]
        elif self.mode == "explicit":
            blocks = [tuple(map(int, r)) for r in self.ranges or []]
            if not blocks or blocks[0][0] != 0 or blocks[-1][1] != n or any(
                    a[1] != b[0] for a, b in zip(blocks, blocks[1:])) or any(a >= b for a, b in blocks):
                raise AnalysisError(f"ranges {blocks} must be ordered, disjoint and cover 0..{n}")
        else:
            raise AnalysisError(f"unknown partition mode {self.mode!r}")
        return LayerPartition(self.mode, self.sizes, self.ranges, blocks)

    @property
    def block_sizes(self) -> list:
        return [b - a for a, b in self.blocks]


@dataclass(frozen=True)
class ThresholdConfig:
    td: float
    td_inter: float

    def __post_init__(self):
        if not (self.td > 0 and self.td_inter > 0):
            raise ValueError("thresholds must be positive")


def build_adjacency(structure: ProteinStructure, partition: LayerPartition,
                    thresholds: ThresholdConfig) -> BlockMatrix:
    """Binary adjacency: a_xy = 1 iff distance < Td (same block) or < Td_Inter."""
    if not partition.blocks:
        partition = partition.resolve(structure)
    x = structure.coords
    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=-1))
    label = np.empty(len(x), dtype=int)
    for j, (a, b) in enumerate(partition.blocks):
        label[a:b] = j
    same = label[:, None] == label[None, :]
    cut = np.where(same, thresholds.td, thresholds.td_inter)
    adj = (dist < cut).astype(float)
    np.fill_diagonal(adj, 0.0)
    part = partition_of(partition.block_sizes)
    counts = {}
    for j, (o, s) in enumerate(part):
        counts[(j, j)] = int(np.count_nonzero(np.triu(adj[o:o + s, o:o + s], 1)))
    for j, k in offdiag_pairs(len(part)):
        (oj, nj), (ok, nk) = part[j], part[k]
        counts[(j, k)] = int(np.count_nonzero(adj[oj:oj + nj, ok:ok + nk]))
    return BlockMatrix(adj, part, {key: 1.0 for key in counts}, counts)


def scaled_protein_matrix(adjacency: BlockMatrix) -> BlockMatrix:
    """Apply edge-count scale factors; empty or full blocks stay unscaled."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        factors = edge_count_scale_factors(adjacency.partition, adjacency.edge_counts)
    skipped = factors.pop("skipped")
    if len(skipped) == len(factors):
        raise AnalysisError("every block is empty or saturated; nothing to analyse")
    out = adjacency.entries.copy()
    for (j, k), f in factors.items():
        (oj, nj), (ok, nk) = adjacency.partition[j], adjacency.partition[k]
        out[oj:oj + nj, ok:ok + nk] *= f
        if j != k:
            out[ok:ok + nk, oj:oj + nj] *= f
    return BlockMatrix(out, adjacency.partition, factors, dict(adjacency.edge_counts), skipped)


def count_columns(partition_sizes: Sequence[int]) -> list:
    m = len(partition_sizes)
    return [f"n{j + 1}" for j in range(m)] + [f"n{j + 1}{k + 1}" for j, k in offdiag_pairs(m)]


def analyse_point(structure, partition, thresholds: ThresholdConfig, k_orders=(2,)):
    """Build, scale and eigensolve one threshold point; returns ratio samples too."""
    adj = build_adjacency(structure, partition, thresholds)
    scaled = scaled_protein_matrix(adj)
    spectrum = eigenvalues(scaled)
    samples = {k: spacing_ratios(spectrum, k) for k in k_orders}
    return adj, scaled, samples


def threshold_sweep(structure: ProteinStructure, partition: LayerPartition, mode: str,
                    values: Sequence[float], td: Optional[float] = None,
                    k_orders: Sequence[int] = (2,), keep_samples: bool = False) -> SweepResult:
    """Single-matrix alpha fits along a threshold axis.

    ``joint``: Td = Td_Inter = value.  ``inter_only``: Td fixed at ``td``,
    Td_Inter = value.
    """
    if mode not in ("joint", "inter_only"):
        raise ValueError(f"mode must be 'joint' or 'inter_only', got {mode!r}")
    if mode == "inter_only" and td is None:
        raise ValueError("inter_only sweep needs a fixed td")
    partition = partition.resolve(structure) if not partition.blocks else partition
    cols = count_columns(partition.block_sizes)
    points = []
    for v in values:
        cfg = ThresholdConfig(float(v), float(v)) if mode == "joint" else ThresholdConfig(float(td), float(v))
        adj, _, samples = analyse_point(structure, partition, cfg, k_orders)
        fits, ks = summarize(samples)
        counts = [adj.edge_counts[key] for key in sorted(adj.edge_counts, key=lambda t: (t[0] != t[1], t))]
        extra = {"td": cfg.td, "td_inter": cfg.td_inter, **dict(zip(cols, counts))}
        points.append(SweepPoint(float(v), fits, ks, extra, samples if keep_samples else {}))
    return SweepResult("td" if mode == "joint" else "td_inter", points)
