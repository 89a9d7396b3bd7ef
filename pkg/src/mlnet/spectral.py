"""Spectra, k-th order spacing ratios, histograms and alpha fits."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from . import analytics

EPS_REL = 1e-12


class SpectrumError(ValueError):
    pass


class EmptySampleError(ValueError):
    pass


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.ndim != 1:
            raise SpectrumError("eigenvalues must be one-dimensional")
        if np.any(np.diff(ev) < 0):
            ev = np.sort(ev)
        object.__setattr__(self, "eigenvalues", ev)

    def __len__(self):
        return self.eigenvalues.size


def eigenvalues(matrix) -> Spectrum:
    """All eigenvalues of a dense real symmetric matrix, ascending.

    Accepts a :class:`~mlnet.netgen.BlockMatrix` or a plain array.  Symmetry is
    a hard precondition: any asymmetry raises rather than being averaged out.
    """
    a = np.asarray(getattr(matrix, "entries", matrix), dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SpectrumError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 2:
        raise SpectrumError("matrix dimension must be at least 2")
    if not np.all(np.isfinite(a)):
        raise SpectrumError("matrix has non-finite entries")
    if not np.array_equal(a, a.T):
        raise SpectrumError(f"matrix is not symmetric (max |a_ij - a_ji| = {np.abs(a - a.T).max():.3g})")
    # LAPACK syevd: Householder tridiagonalisation, then divide and conquer
    return Spectrum(np.linalg.eigvalsh(a))


def eigenpair_residuals(a: np.ndarray) -> float:
    """max_j ||A v_j - lambda_j v_j|| / ||A||_2, for checking the solver."""
    a = np.asarray(a, dtype=float)
    w, v = np.linalg.eigh(a)
    res = np.linalg.norm(a @ v - v * w, axis=0).max()
    return float(res / max(np.abs(w).max(), np.finfo(float).tiny))


@dataclass
class RatioSample:
    k: int
    values: np.ndarray
    dropped: int = 0
    source_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    def __len__(self):
        return self.values.size

    def merge(self, other: "RatioSample") -> "RatioSample":
        if other.k != self.k:
            raise ValueError(f"cannot pool k={self.k} with k={other.k}")
        meta = dict(self.source_meta)
        meta["realizations"] = meta.get("realizations", 0) + other.source_meta.get("realizations", 0)
        return RatioSample(self.k, np.concatenate([self.values, other.values]),
                           self.dropped + other.dropped, meta)

    @classmethod
    def pool(cls, samples: Iterable["RatioSample"]) -> "RatioSample":
        samples = list(samples)
        if not samples:
            raise EmptySampleError("nothing to pool")
        out = samples[0]
        for s in samples[1:]:
            out = out.merge(s)
        return out


def spacing_ratios(spectrum, k: int = 1) -> RatioSample:
    """r_i = (l[i+2k] - l[i+k]) / (l[i+k] - l[i]) for i = 0 .. n-2k-1.

    Ratios whose numerator or denominator falls below 1e-12 times the
    spectral width are discarded and counted in ``dropped``; exact
    degeneracies are common in adjacency spectra (isolated nodes, bipartite
    zero modes).
    """
    lam = spectrum.eigenvalues if isinstance(spectrum, Spectrum) else np.sort(np.asarray(spectrum, dtype=float))
    k = int(k)
    if k < 1:
        raise ValueError("k must be >= 1")
    n = lam.size
    if n < 2 * k + 1:
        raise SpectrumError(f"need at least {2 * k + 1} eigenvalues for k={k}, got {n}")
    num = lam[2 * k:] - lam[k:-k]
    den = lam[k:-k] - lam[:-2 * k]
    tol = EPS_REL * (lam[-1] - lam[0])
    keep = (den > tol) & (num > tol)
    return RatioSample(k, num[keep] / den[keep], int((~keep).sum()),
                       {"realizations": 1, "n": int(n)})


@dataclass(frozen=True)
class EmpiricalHistogram:
    bin_edges: np.ndarray
    densities: np.ndarray
    n_samples: int
    support_cut: float

    @property
    def centers(self) -> np.ndarray:
        return np.round(0.5 * (self.bin_edges[1:] + self.bin_edges[:-1]), 12)


def histogram(sample, bin_width: float = 0.1, support_cut: float = 5.0) -> EmpiricalHistogram:
    """Uniform bins on [0, support_cut], normalised by the *total* sample size.

    Mass beyond ``support_cut`` is therefore missing from the bars, exactly as
    it is missing from the analytic density drawn over the same range.
    """
    values = np.asarray(getattr(sample, "values", sample), dtype=float)
    if values.size == 0:
        raise EmptySampleError("cannot histogram an empty sample")
    if bin_width <= 0 or support_cut <= 0:
        raise ValueError("bin_width and support_cut must be positive")
    nbins = int(round(support_cut / bin_width))
    edges = np.linspace(0.0, nbins * bin_width, nbins + 1)
    counts, _ = np.histogram(values, bins=edges)
    return EmpiricalHistogram(edges, counts / (values.size * bin_width), values.size, float(edges[-1]))


def _ks_sorted(x: np.ndarray, alpha: float) -> float:
    n = x.size
    f = analytics.csrd_fast(alpha, x)
    i = np.arange(1, n + 1)
    return float(max((i / n - f).max(), (f - (i - 1) / n).max()))


def ks_distance(sample, curve) -> float:
    """Two-sided Kolmogorov-Smirnov distance between the sample and the CSRD."""
    values = np.asarray(getattr(sample, "values", sample), dtype=float)
    if values.size == 0:
        raise EmptySampleError("ks_distance needs a non-empty sample")
    alpha = getattr(curve, "alpha", curve)
    return _ks_sorted(np.sort(values), float(alpha))


@dataclass
class FitResult:
    alpha_hat: float
    distance: float
    alpha_grid: dict
    at_boundary: bool = False
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {"alpha_hat": self.alpha_hat, "distance": self.distance,
                "alpha_grid": self.alpha_grid, "at_boundary": self.at_boundary,
                "degenerate": self.degenerate}


TIE_TOL = 1e-12


def alpha_grid(lo: float = 0.0, hi: float = 14.0, step: float = 0.05) -> np.ndarray:
    n = int(round((hi - lo) / step))
    return np.round(lo + step * np.arange(n + 1), 10)


def fit_alpha(sample, lo: float = 0.0, hi: float = 14.0, step: float = 0.05,
              grid: Optional[np.ndarray] = None) -> FitResult:
    """Grid search for the alpha minimising the KS distance.

    Ties (within 1e-12, the accuracy of the tabulated CDF) go to the
    smaller alpha.  A minimum on either end of the grid is flagged; so is a
    sample with a single distinct value, whose step CDF has no meaningful
    optimum.
    """
    values = np.asarray(getattr(sample, "values", sample), dtype=float)
    if values.size == 0:
        raise EmptySampleError("fit_alpha needs a non-empty sample")
    if grid is None:
        grid = alpha_grid(lo, hi, step)
    grid = np.asarray(grid, dtype=float)
    x = np.sort(values)
    dists = np.array([_ks_sorted(x, a) for a in grid])
    i = int(np.flatnonzero(dists <= dists.min() + TIE_TOL)[0])
    return FitResult(
        alpha_hat=float(grid[i]),
        distance=float(dists[i]),
        alpha_grid={"lo": float(grid[0]), "hi": float(grid[-1]), "step": step, "size": int(grid.size)},
        at_boundary=i in (0, grid.size - 1),
        degenerate=bool(np.unique(x).size == 1),
    )
