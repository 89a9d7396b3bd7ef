"""Seeded ensembles of network realizations and parameter sweeps."""
from __future__ import annotations

import dataclasses
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import analytics
from .netgen import MultilayerSpec, assemble, probability_scale_factors
from .spectral import FitResult, RatioSample, eigenvalues, fit_alpha, ks_distance, spacing_ratios

log = logging.getLogger(__name__)


class RealizationError(RuntimeError):
    pass


@dataclass
class ExperimentPlan:
    spec: MultilayerSpec
    realizations: int = 100
    k_orders: list = field(default_factory=lambda: [2])
    master_seed: int = 0
    expected_m: Optional[int] = None
    first_index: int = 0

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        self.k_orders = [int(k) for k in self.k_orders]
        for k in self.k_orders:
            if k < 1 or self.spec.n < 2 * k + 1:
                raise ValueError(f"k={k} needs n >= {2 * k + 1}, network has n={self.spec.n}")
        if self.expected_m is None:
            self.expected_m = self.spec.m


def _one_realization(args):
    spec, seed, index, k_orders = args
    try:
        spectrum = eigenvalues(assemble(spec, seed=seed, realization=index))
    except Exception as exc:
        raise RealizationError(f"realization {index}: {exc}") from exc
    return {k: spacing_ratios(spectrum, k) for k in k_orders}


def run_ensemble(plan: ExperimentPlan, jobs: int = 1) -> dict[int, RatioSample]:
    """Pool k-th order ratios over ``plan.realizations`` seeded matrices.

    Realization ``i`` draws from streams derived from ``(master_seed, i)``
    only, and pooling concatenates in index order, so the result does not
    depend on ``jobs``.
    """
    if plan.spec.scaling == "probability_based" and plan.spec.gamma is None:
        probability_scale_factors(plan.spec, strict=False)  # warns once about unscalable blocks
    indices = range(plan.first_index, plan.first_index + plan.realizations)
    tasks = [(plan.spec, plan.master_seed, i, plan.k_orders) for i in indices]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_one_realization, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_one_realization(t) for t in tasks]
    pooled = {}
    for k in plan.k_orders:
        sample = RatioSample.pool(r[k] for r in results)
        sample.source_meta.update(m=plan.spec.m, spec_hash=plan.spec.digest(), n=plan.spec.n)
        pooled[k] = sample
    return pooled


def expected_alpha(plan: ExperimentPlan, k: int) -> float:
    """Table lookup with the effective block count for the plan's case.

    Only the block-diagonal case keeps its m independent GOE blocks; any
    inter-layer coupling (cases b, c, d) yields a single GOE.
    """
    case = plan.spec.case
    if plan.spec.gamma is not None or case is None:
        raise ValueError("expected_alpha needs a plain case a-d network")
    m_eff = plan.expected_m if case == "a" else 1
    return analytics.alpha_for(k, m_eff)


@dataclass
class SweepPoint:
    value: float
    fits: dict            # k -> FitResult
    ks: dict              # k -> {alpha: ks distance} for the candidate curves
    extra: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict, repr=False)


@dataclass
class SweepResult:
    axis: str
    points: list

    def __post_init__(self):
        self.points = sorted(self.points, key=lambda p: p.value)

    def rows(self, candidates: Sequence[float] = ()):
        for p in self.points:
            for k, fit in sorted(p.fits.items()):
                row = {self.axis: p.value, "k": k, "alpha_hat": fit.alpha_hat, "ks_distance": fit.distance}
                row.update(p.extra)
                for a in candidates:
                    row[f"ks_alpha_{a:g}"] = p.ks[k].get(float(a))
                yield row


def candidate_alphas(k: int) -> list[float]:
    """Table values reachable for ratio order k, deduplicated, ascending."""
    return sorted({analytics.alpha_for(k, m) for m in range(1, 5)})


def summarize(samples: dict[int, RatioSample], candidates: Optional[dict] = None):
    """Fit and candidate KS distances per k.

    A sample with no surviving ratios (fully degenerate spectrum) gets a NaN
    fit flagged ``degenerate`` so that one bad point does not abort a sweep.
    """
    fits, ks = {}, {}
    for k, sample in samples.items():
        alphas = candidates.get(k) if candidates else candidate_alphas(k)
        if len(sample) == 0:
            log.warning("k=%d: no ratios survived (%d dropped)", k, sample.dropped)
            fits[k] = FitResult(math.nan, math.nan, {}, degenerate=True)
            ks[k] = {float(a): math.nan for a in alphas}
            continue
        fits[k] = fit_alpha(sample)
        ks[k] = {float(a): ks_distance(sample, a) for a in alphas}
    return fits, ks


def crossover_sweep(plan: ExperimentPlan, gamma_values: Sequence[float], jobs: int = 1,
                    candidates: Optional[dict] = None, keep_samples: bool = False) -> SweepResult:
    """Fit alpha per k at each gamma; every gamma reuses the master seed."""
    if plan.spec.m != 2:
        raise ValueError("crossover sweep needs a bilayer spec")
    points = []
    for g in gamma_values:
        spec = dataclasses.replace(plan.spec, gamma=float(g))
        sub = dataclasses.replace(plan, spec=spec)
        samples = run_ensemble(sub, jobs=jobs)
        fits, ks = summarize(samples, candidates)
        log.info("gamma=%g %s", g, {k: f.alpha_hat for k, f in fits.items()})
        points.append(SweepPoint(float(g), fits, ks, {}, samples if keep_samples else {}))
    return SweepResult("gamma", points)
