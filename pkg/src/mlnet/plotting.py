"""Static figure output (SVG by default) for histograms, CSRDs and sweeps."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import analytics  # noqa: E402

# deterministic SVG ids/dates so reruns produce identical files
plt.rcParams["svg.hashsalt"] = "mlnet"
_META = {"Date": None, "Creator": None}

CURVE_STYLES = ["-", "--", "-.", ":"]


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    kw = {"metadata": _META} if path.suffix == ".svg" else {}
    fig.savefig(path, bbox_inches="tight", **kw)
    plt.close(fig)
    return path


def srd_figure(hist, alphas, path, title=""):
    """Histogram bars with the analytic densities for each alpha on top."""
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    width = hist.bin_edges[1] - hist.bin_edges[0]
    ax.bar(hist.centers, hist.densities, width=width, color="0.8", edgecolor="0.5", lw=0.4)
    r = np.linspace(0.0, hist.support_cut, 501)
    for i, a in enumerate(alphas):
        ax.plot(r, analytics.density(a, r), CURVE_STYLES[i % 4], color="k", lw=1.2, label=rf"$\alpha={a:g}$")
    ax.set_xlim(0, hist.support_cut)
    ax.set_xlabel(r"$r$")
    ax.set_ylabel(r"$P(r)$")
    if title:
        ax.set_title(title, fontsize=9)
    if alphas:
        ax.legend(frameon=False, fontsize=8)
    return _save(fig, path)


def csrd_figure(sample, alphas, path, support_cut=5.0, title=""):
    """Empirical CDF of the ratios against the analytic CSRD curves."""
    values = np.sort(np.asarray(getattr(sample, "values", sample)))
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ecdf = np.arange(1, values.size + 1) / values.size
    inside = values <= support_cut
    ax.step(values[inside], ecdf[inside], where="post", color="0.5", lw=1.5, label="empirical")
    s = np.linspace(0.0, support_cut, 501)
    for i, a in enumerate(alphas):
        ax.plot(s, analytics.csrd(a, s), CURVE_STYLES[i % 4], color="k", lw=1.0, label=rf"$\alpha={a:g}$")
    ax.set_xlim(0, support_cut)
    ax.set_ylim(0, 1.02)
    ax.set_xlabel(r"$s$")
    ax.set_ylabel(r"$P_c(s)$")
    if title:
        ax.set_title(title, fontsize=9)
    ax.legend(frameon=False, fontsize=8, loc="lower right")
    return _save(fig, path)


def sweep_figure(sweep, path, reference=()):
    """alpha_hat against the sweep parameter, one line per k."""
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ks = sorted({k for p in sweep.points for k in p.fits})
    for i, k in enumerate(ks):
        x = [p.value for p in sweep.points if k in p.fits]
        y = [p.fits[k].alpha_hat for p in sweep.points if k in p.fits]
        ax.plot(x, y, "o" + CURVE_STYLES[i % 4], color="k", ms=4, lw=1, label=f"k={k}")
    for a in reference:
        ax.axhline(a, color="0.6", lw=0.6, ls=":")
    ax.set_xlabel(sweep.axis)
    ax.set_ylabel(r"$\hat\alpha$")
    ax.legend(frameon=False, fontsize=8)
    return _save(fig, path)
