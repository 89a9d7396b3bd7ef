"""Spectral fluctuations of multilayer networks via k-th order spacing ratios."""
from .analytics import AnalyticCurve, alpha_for, csrd, density, normalization_constant
from .ensemble import ExperimentPlan, crossover_sweep, expected_alpha, run_ensemble
from .netgen import BlockMatrix, MultilayerSpec, assemble, crossover_assemble
from .spectral import eigenvalues, fit_alpha, histogram, ks_distance, spacing_ratios

__version__ = "0.1.0"

__all__ = [
    "AnalyticCurve", "alpha_for", "csrd", "density", "normalization_constant",
    "ExperimentPlan", "crossover_sweep", "expected_alpha", "run_ensemble",
    "BlockMatrix", "MultilayerSpec", "assemble", "crossover_assemble",
    "eigenvalues", "fit_alpha", "histogram", "ks_distance", "spacing_ratios",
]
