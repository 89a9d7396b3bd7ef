"""Block-structured adjacency matrices for multilayer networks.

Layers are indexed from 0.  Off-diagonal blocks are addressed by ``(j, k)``
with ``j < k`` and are always stored in row-major upper-triangular order,
the same order used by the ``inter_p`` list in :class:`MultilayerSpec`.
"""
from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field, asdict
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

DIAG_MODES = ("random", "zero")
OFF_DIAG_MODES = ("random", "identity", "zero")
SCALINGS = ("none", "probability_based", "edge_count_based")

# case letter -> (diag_mode, off_diag_mode)
CASES = {
    "a": ("random", "zero"),
    "b": ("random", "random"),
    "c": ("random", "identity"),
    "d": ("zero", "random"),
}


class SpecError(ValueError):
    pass


class DegenerateVarianceError(ValueError):
    """A block with zero variance (p in {0, 1}, or empty/saturated) cannot be scaled."""

    def __init__(self, block, message):
        super().__init__(f"block {block}: {message}")
        self.block = block


def offdiag_pairs(m: int) -> list[tuple[int, int]]:
    return list(combinations(range(m), 2))


@dataclass
class MultilayerSpec:
    layers: list[int]
    intra_p: list[float] = field(default_factory=list)
    inter_p: list[float] = field(default_factory=list)
    diag_mode: str = "random"
    off_diag_mode: str = "zero"
    scaling: str = "probability_based"
    gamma: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        self.layers = [int(n) for n in self.layers]
        self.intra_p = [float(p) for p in self.intra_p]
        self.inter_p = [float(p) for p in self.inter_p]
        self.validate()

    @property
    def m(self) -> int:
        return len(self.layers)

    @property
    def n(self) -> int:
        return sum(self.layers)

    @property
    def case(self) -> Optional[str]:
        for name, modes in CASES.items():
            if modes == (self.diag_mode, self.off_diag_mode):
                return name
        return None

    def inter(self, j: int, k: int) -> float:
        return self.inter_p[offdiag_pairs(self.m).index((min(j, k), max(j, k)))]

    def validate(self):
        if not self.layers or any(n < 1 for n in self.layers):
            raise SpecError("layers must be a non-empty list of positive sizes")
        if self.diag_mode not in DIAG_MODES:
            raise SpecError(f"diag_mode must be one of {DIAG_MODES}")
        if self.off_diag_mode not in OFF_DIAG_MODES:
            raise SpecError(f"off_diag_mode must be one of {OFF_DIAG_MODES}")
        if self.scaling not in SCALINGS:
            raise SpecError(f"scaling must be one of {SCALINGS}")
        if self.diag_mode == "random":
            if len(self.intra_p) != self.m:
                raise SpecError(f"intra_p needs {self.m} entries, got {len(self.intra_p)}")
            if any(n < 2 for n in self.layers):
                raise SpecError("random diagonal blocks need at least 2 nodes")
        npairs = self.m * (self.m - 1) // 2
        needs_inter = self.off_diag_mode == "random" or self.gamma is not None
        if needs_inter and len(self.inter_p) != npairs:
            raise SpecError(f"inter_p needs {npairs} entries (row-major upper triangle), got {len(self.inter_p)}")
        for p in self.intra_p + self.inter_p:
            if not 0.0 <= p <= 1.0:
                raise SpecError(f"probability out of [0, 1]: {p}")
        if self.off_diag_mode == "identity" and len(set(self.layers)) != 1:
            raise SpecError("identity (multiplex) off-diagonal blocks require equal layer sizes")
        if self.gamma is not None:
            if self.m != 2:
                raise SpecError("gamma (crossover) is only defined for m = 2")
            if not (math.isfinite(self.gamma) and 0.0 <= self.gamma <= 1.0):
                raise SpecError(f"gamma must lie in [0, 1], got {self.gamma}")
            if len(self.intra_p) != 2:
                raise SpecError("crossover needs intra_p for both layers")

    # -- serialisation -------------------------------------------------------

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MultilayerSpec":
        allowed = set(cls.__dataclass_fields__)
        unknown = set(d) - allowed
        if unknown:
            raise SpecError(f"unknown keys in network spec: {sorted(unknown)}")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MultilayerSpec":
        return cls.from_dict(json.loads(text))

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


@dataclass(frozen=True)
class BlockMatrix:
    """Symmetric adjacency matrix together with its block bookkeeping.

    ``scales`` and ``edge_counts`` are keyed by ``(j, j)`` for diagonal
    blocks and ``(j, k)``, j < k, for off-diagonal ones.  Edge counts refer to
    the binary matrix before any scaling.
    """

    entries: np.ndarray
    partition: tuple[tuple[int, int], ...]
    scales: dict
    edge_counts: dict
    skipped: tuple = ()

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def block(self, j: int, k: int) -> np.ndarray:
        (oj, nj), (ok, nk) = self.partition[j], self.partition[k]
        return self.entries[oj:oj + nj, ok:ok + nk]


def partition_of(sizes: Sequence[int]) -> tuple[tuple[int, int], ...]:
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    return tuple((int(o), int(n)) for o, n in zip(offsets, sizes))


# -- random blocks -----------------------------------------------------------

def er_diag_block(n_j: int, p_j: float, rng: np.random.Generator) -> np.ndarray:
    """G(n, p) adjacency: symmetric, zero diagonal, each pair kept with prob. p."""
    if n_j < 2:
        raise SpecError(f"diagonal block needs n_j >= 2, got {n_j}")
    if not 0.0 <= p_j <= 1.0:
        raise SpecError(f"probability out of [0, 1]: {p_j}")
    iu = np.triu_indices(n_j, k=1)
    block = np.zeros((n_j, n_j))
    block[iu] = rng.random(iu[0].size) < p_j
    return block + block.T


def er_offdiag_block(n_j: int, n_k: int, p_jk: float, rng: np.random.Generator) -> np.ndarray:
    if n_j < 1 or n_k < 1:
        raise SpecError(f"off-diagonal block sizes must be positive, got ({n_j}, {n_k})")
    if not 0.0 <= p_jk <= 1.0:
        raise SpecError(f"probability out of [0, 1]: {p_jk}")
    return (rng.random((n_j, n_k)) < p_jk).astype(float)


# -- scale factors -----------------------------------------------------------

def diag_probability_scale(n_j: int, p_j: float) -> float:
    return 1.0 / math.sqrt(4.0 * n_j * p_j * (1.0 - p_j))


def offdiag_probability_scale(n_j: int, n_k: int, p_jk: float) -> float:
    return 1.0 / math.sqrt(4.0 * math.sqrt(n_j * n_k) * p_jk * (1.0 - p_jk))


def diag_edge_count_scale(n_j: int, edges: int) -> float:
    return 1.0 / math.sqrt(8.0 * edges / (n_j - 1) * (1.0 - 2.0 * edges / (n_j * (n_j - 1))))


def offdiag_edge_count_scale(n_j: int, n_k: int, edges: int) -> float:
    return 1.0 / math.sqrt(4.0 * edges / math.sqrt(n_j * n_k) * (1.0 - edges / (n_j * n_k)))


def _probability_factors(spec: MultilayerSpec):
    sizes = spec.layers
    factors, skipped = {}, []
    for j, n_j in enumerate(sizes):
        p = spec.intra_p[j] if spec.diag_mode == "random" else None
        if p is None:
            factors[(j, j)] = 1.0
        elif p in (0.0, 1.0):
            factors[(j, j)] = 1.0
            skipped.append(((j, j), p))
        else:
            factors[(j, j)] = diag_probability_scale(n_j, p)
    random_off = spec.off_diag_mode == "random" or spec.gamma is not None
    for j, k in offdiag_pairs(spec.m):
        p = spec.inter(j, k) if random_off else None
        if p is None:
            factors[(j, k)] = 1.0
        elif p in (0.0, 1.0):
            factors[(j, k)] = 1.0
            skipped.append(((j, k), p))
        else:
            factors[(j, k)] = offdiag_probability_scale(sizes[j], sizes[k], p)
    return factors, skipped


def probability_scale_factors(spec: MultilayerSpec, strict: bool = True) -> dict:
    """Per-block multipliers from the connection probabilities.

    Identity and zero blocks get 1.  A random block with p in {0, 1} has no
    variance: with ``strict`` this raises, otherwise it is left at 1 with a
    warning.
    """
    factors, skipped = _probability_factors(spec)
    for block, p in skipped:
        _degenerate(block, f"p={p} has zero variance; use scaling='none' for it", strict)
    return factors


def edge_count_scale_factors(partition, edge_counts: dict, strict: bool = False) -> dict:
    """Per-block multipliers from observed edge counts.

    Blocks with no edges or with every possible edge cannot be scaled; they
    get multiplier 1 and are listed in the ``skipped`` entry of the result
    (or raise, when ``strict``).
    """
    sizes = [n for _, n in partition]
    factors, skipped = {}, []
    for key, edges in sorted(edge_counts.items()):
        j, k = key
        if j == k:
            n_j = sizes[j]
            full = n_j * (n_j - 1) // 2
            ok = 0 < edges < full
            value = diag_edge_count_scale(n_j, edges) if ok else 1.0
        else:
            full = sizes[j] * sizes[k]
            ok = 0 < edges < full
            value = offdiag_edge_count_scale(sizes[j], sizes[k], edges) if ok else 1.0
        if not ok:
            _degenerate(key, f"{edges} of {full} possible edges; block left unscaled", strict)
            skipped.append(key)
        factors[key] = value
    factors["skipped"] = tuple(skipped)
    return factors


def _degenerate(block, message, strict):
    if strict:
        raise DegenerateVarianceError(block, message)
    warnings.warn(f"block {block}: {message}", stacklevel=3)


# -- seeding -----------------------------------------------------------------

def block_rng(seed, realization: int, block: tuple[int, int]) -> np.random.Generator:
    """Independent stream per (realization, block).

    Keying on the block identity means a block's draws do not depend on which
    other blocks a given case happens to generate.
    """
    j, k = block
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(int(realization), int(j), int(k)))
    return np.random.default_rng(ss)


# -- assembly ----------------------------------------------------------------

def _binary_blocks(spec: MultilayerSpec, seed, realization: int, draw_diag: bool, draw_off: bool):
    sizes = spec.layers
    diag, off = {}, {}
    for j, n_j in enumerate(sizes):
        if draw_diag:
            diag[j] = er_diag_block(n_j, spec.intra_p[j], block_rng(seed, realization, (j, j)))
        else:
            diag[j] = np.zeros((n_j, n_j))
    for j, k in offdiag_pairs(spec.m):
        if draw_off == "identity":
            off[(j, k)] = np.eye(sizes[j], sizes[k])
        elif draw_off:
            off[(j, k)] = er_offdiag_block(sizes[j], sizes[k], spec.inter(j, k),
                                           block_rng(seed, realization, (j, k)))
        else:
            off[(j, k)] = np.zeros((sizes[j], sizes[k]))
    return diag, off


def _edge_counts(diag, off) -> dict:
    counts = {(j, j): int(np.count_nonzero(np.triu(b, 1))) for j, b in diag.items()}
    counts.update({key: int(np.count_nonzero(b)) for key, b in off.items()})
    return counts


def _place(partition, diag, off, wdiag=1.0, woff=1.0) -> np.ndarray:
    n = sum(s for _, s in partition)
    out = np.zeros((n, n))
    for j, b in diag.items():
        o, s = partition[j]
        out[o:o + s, o:o + s] = wdiag * b
    for (j, k), b in off.items():
        (oj, nj), (ok, nk) = partition[j], partition[k]
        out[oj:oj + nj, ok:ok + nk] = woff * b
        out[ok:ok + nk, oj:oj + nj] = woff * b.T
    return out


def _scales(spec, counts, partition):
    if spec.scaling == "none":
        return {key: 1.0 for key in counts}, ()
    if spec.scaling == "probability_based":
        factors, skipped = _probability_factors(spec)
        return factors, tuple(block for block, _ in skipped)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        factors = edge_count_scale_factors(partition, counts)
    skipped = factors.pop("skipped")
    if spec.off_diag_mode == "identity":
        # identity blocks are structural, never rescaled
        for key in offdiag_pairs(spec.m):
            factors[key] = 1.0
    return factors, skipped


def assemble(spec: MultilayerSpec, seed=None, realization: int = 0) -> BlockMatrix:
    """Build one scaled realization of ``spec``.

    Cases: a = random diagonal / zero off-diagonal, b = both random,
    c = random diagonal / identity off-diagonal, d = zero diagonal / random
    off-diagonal.  A spec carrying ``gamma`` is routed to
    :func:`crossover_assemble`.
    """
    if spec.gamma is not None:
        return crossover_assemble(spec, seed, realization)
    seed = spec.seed if seed is None else seed
    partition = partition_of(spec.layers)
    off_mode = {"random": True, "zero": False, "identity": "identity"}[spec.off_diag_mode]
    diag, off = _binary_blocks(spec, seed, realization, spec.diag_mode == "random", off_mode)
    counts = _edge_counts(diag, off)
    scales, skipped = _scales(spec, counts, partition)
    diag = {j: scales[(j, j)] * b for j, b in diag.items()}
    off = {key: scales[key] * b for key, b in off.items()}
    return BlockMatrix(_place(partition, diag, off), partition, scales, counts, skipped)


def crossover_assemble(spec: MultilayerSpec, seed=None, realization: int = 0) -> BlockMatrix:
    """(1 - gamma) * diag(A1, A2) + gamma * offdiag(B12), blocks scaled first."""
    if spec.gamma is None or spec.m != 2:
        raise SpecError("crossover needs a bilayer spec with gamma set")
    gamma = float(spec.gamma)
    if not 0.0 <= gamma <= 1.0:
        raise SpecError(f"gamma must lie in [0, 1], got {gamma}")
    seed = spec.seed if seed is None else seed
    partition = partition_of(spec.layers)
    diag, off = _binary_blocks(spec, seed, realization, True, True)
    counts = _edge_counts(diag, off)
    full = MultilayerSpec(spec.layers, spec.intra_p, spec.inter_p, "random", "random", spec.scaling)
    scales, skipped = _scales(full, counts, partition)
    diag = {j: scales[(j, j)] * b for j, b in diag.items()}
    off = {key: scales[key] * b for key, b in off.items()}
    entries = _place(partition, diag, off, wdiag=1.0 - gamma, woff=gamma)
    return BlockMatrix(entries, partition, scales, counts, skipped)
