"""Analytic spacing-ratio distributions.

The family of densities

    P(alpha, r) = C_alpha (r + r^2)^alpha / (1 + r + r^2)^(1 + 3 alpha / 2)

covers nearest-neighbour GOE statistics (alpha = 1) as well as higher-order
ratios and superpositions of independent GOE blocks, where alpha is looked up
from the (k, m) table below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

ALPHA_MAX = 20.0

# (k, m) -> alpha.  Entries flagged approximate are quoted as "~x" in the source table.
ALPHA_TABLE: dict[tuple[int, int], float] = {
    (1, 1): 1.0, (1, 2): 0.0, (1, 3): 0.0, (1, 4): 0.0,
    (2, 1): 4.0, (2, 2): 2.0, (2, 3): 1.25, (2, 4): 1.0,
    (3, 1): 8.0, (3, 2): 4.0, (3, 3): 3.0, (3, 4): 2.5,
    (4, 1): 13.0, (4, 2): 7.0, (4, 3): 5.0, (4, 4): 4.0,
}
APPROXIMATE_ENTRIES = frozenset({(1, 2), (1, 3), (1, 4), (2, 3), (3, 4)})

CLOSED_FORM_ALPHAS = (1.0, 2.0, 4.0, 8.0)


class DomainError(ValueError):
    """Argument outside the domain of an analytic function."""


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= -1.0:
        raise DomainError(f"alpha must be finite and > -1, got {alpha!r}")
    if alpha > ALPHA_MAX:
        raise DomainError(f"alpha above supported maximum {ALPHA_MAX}: {alpha!r}")
    return alpha


def _kernel(alpha: float, r):
    """Unnormalised density; works on scalars and arrays."""
    r = np.asarray(r, dtype=float)
    q = 1.0 + r + r * r
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (r + r * r) ** alpha / q ** (1.0 + 1.5 * alpha)
    return out


def _kernel_t(alpha: float, t):
    """Unnormalised density in t = r/(1+r), Jacobian included.

    With u = 1 - t the integrand becomes t^a u^a / (u^2 + t u + t^2)^(1 + 3a/2),
    which is bounded on [0, 1].
    """
    t = np.asarray(t, dtype=float)
    u = 1.0 - t
    q = u * u + t * u + t * t
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (t * u) ** alpha / q ** (1.0 + 1.5 * alpha)
    return out


@lru_cache(maxsize=256)
def _normalization(alpha: float) -> float:
    val, _ = integrate.quad(
        lambda t: float(_kernel_t(alpha, t)), 0.0, 1.0,
        epsabs=1e-13, epsrel=1e-13, limit=400,
    )
    return 1.0 / val


def normalization_constant(alpha: float) -> float:
    """Return C_alpha so that the density integrates to one on [0, inf)."""
    return _normalization(_check_alpha(alpha))


def density(alpha: float, r):
    """Evaluate P(alpha, r). Accepts scalar or array ``r``."""
    alpha = _check_alpha(alpha)
    arr = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("r must be finite and non-negative")
    out = normalization_constant(alpha) * _kernel(alpha, arr)
    if alpha == 0.0:
        # 0**0 already gives 1; keep the r=0 limit explicit for clarity
        out = np.where(arr == 0.0, normalization_constant(alpha), out)
    if np.ndim(r) == 0:
        return float(out)
    return out


# -- closed forms, transcribed with s as the upper limit ---------------------

def _atan_part(s):
    return 3.0 * np.arctan((1.0 + 2.0 * s) / math.sqrt(3.0)) / math.pi


def _prefactor(s):
    return 3.0 * math.sqrt(3.0) * (-1.0 + s) * s * (1.0 + s) * (2.0 + s) * (1.0 + 2.0 * s)


def _csrd_1(s):
    q = 1.0 + s + s * s
    return 0.25 * (2.0 + (1.0 + 2.0 * s) * (-2.0 + s + s * s) / q ** 1.5)


def _csrd_2(s):
    q = 1.0 + s + s * s
    return -0.5 + _prefactor(s) / (4.0 * math.pi * q ** 3) + _atan_part(s)


def _csrd_4(s):
    q = 1.0 + s + s * s
    u = s * (1.0 + s)
    poly = 2.0 + u * (6.0 + u * (15.0 + 2.0 * u))
    return -0.5 + _prefactor(s) * poly / (8.0 * math.pi * q ** 6) + _atan_part(s)


def _csrd_8(s):
    q = 1.0 + s + s * s
    u = s * (1.0 + s)
    poly = 140.0 + u * (1260.0 + u * (5670.0 + u * (15540.0 + u * (
        30492.0 + u * (40446.0 + u * (51099.0 + 14.0 * u * (
            873.0 + 5.0 * u * (27.0 + 2.0 * u))))))))
    return -0.5 + _prefactor(s) * poly / (560.0 * math.pi * q ** 12) + _atan_part(s)


_CLOSED_FORMS = {1.0: _csrd_1, 2.0: _csrd_2, 4.0: _csrd_4, 8.0: _csrd_8}


def csrd_closed_form(alpha: float, s):
    """Closed-form cumulative distribution; only alpha in {1, 2, 4, 8}."""
    alpha = _check_alpha(alpha)
    if alpha not in _CLOSED_FORMS:
        raise DomainError(f"no closed form for alpha={alpha}; use csrd_quadrature")
    s = _check_s(s)
    with np.errstate(over="ignore", invalid="ignore"):
        out = _CLOSED_FORMS[alpha](s)
    # q**12 overflows for huge s; the limit is 1
    out = np.where(np.isfinite(out), out, 1.0)
    # -1/2 + 3 atan(1/sqrt 3)/pi leaves round-off at s = 0
    out = np.clip(np.where(s == 0.0, 0.0, out), 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def _check_s(s):
    arr = np.asarray(s, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError("s must be non-negative")
    return arr


def _csrd_quad_scalar(alpha: float, s: float) -> float:
    if s == 0.0:
        return 0.0
    if math.isinf(s):
        return 1.0
    c = normalization_constant(alpha)
    t = s / (1.0 + s)
    # integrate the smaller side for accuracy; density is symmetric under r -> 1/r
    if t <= 0.5:
        val, _ = integrate.quad(lambda x: float(_kernel_t(alpha, x)), 0.0, t,
                                epsabs=1e-13, epsrel=1e-12, limit=400)
        return c * val
    val, _ = integrate.quad(lambda x: float(_kernel_t(alpha, x)), t, 1.0,
                            epsabs=1e-13, epsrel=1e-12, limit=400)
    return 1.0 - c * val


def csrd_quadrature(alpha: float, s):
    """Cumulative distribution by adaptive quadrature of the density."""
    alpha = _check_alpha(alpha)
    arr = _check_s(s)
    out = np.vectorize(lambda x: _csrd_quad_scalar(alpha, float(x)), otypes=[float])(arr)
    return float(out) if np.ndim(out) == 0 else out


def csrd(alpha: float, s):
    """Cumulative spacing-ratio distribution int_0^s P(alpha, r) dr.

    Uses the closed form when alpha is 1, 2, 4 or 8, quadrature otherwise.
    """
    alpha = _check_alpha(alpha)
    if alpha in _CLOSED_FORMS:
        return csrd_closed_form(alpha, s)
    return csrd_quadrature(alpha, s)


def alpha_for(k: int, m: int) -> float:
    """Look up alpha for ratio order ``k`` and ``m`` superposed GOE blocks."""
    try:
        return ALPHA_TABLE[(int(k), int(m))]
    except (KeyError, TypeError, ValueError):
        raise LookupError(f"no alpha for (k={k}, m={m}); valid range is 1 <= k <= 4, 1 <= m <= 4") from None


# -- fast tabulated CDF for fitting ------------------------------------------

_N_NODES = 4096


@lru_cache(maxsize=1024)
def _cdf_table(alpha: float) -> CubicHermiteSpline:
    # Gauss-Legendre panels on t in [0, 1]; cumulative sums give exact node values
    # and the spline uses the density as the derivative.
    t = np.linspace(0.0, 1.0, _N_NODES + 1)
    x, w = np.polynomial.legendre.leggauss(12)
    a, b = t[:-1, None], t[1:, None]
    pts = 0.5 * (b - a) * x + 0.5 * (b + a)
    panel = (0.5 * (b - a) * w * _kernel_t(alpha, pts)).sum(axis=1)
    c = normalization_constant(alpha)
    cum = np.concatenate([[0.0], np.cumsum(panel)]) * c
    cum /= cum[-1]
    deriv = c * _kernel_t(alpha, t)
    deriv = np.nan_to_num(deriv, nan=0.0, posinf=0.0)
    return CubicHermiteSpline(t, cum, deriv)


def csrd_fast(alpha: float, s):
    """Tabulated CDF (spline in t = s/(1+s)); accurate to ~1e-10, vectorised."""
    alpha = _check_alpha(alpha)
    s = np.asarray(s, dtype=float)
    t = np.where(np.isinf(s), 1.0, s / (1.0 + s))
    out = np.clip(_cdf_table(alpha)(t), 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class AnalyticCurve:
    """The density/CSRD pair for one alpha."""

    alpha: float
    c_alpha: float = field(init=False)
    eval_mode: str = field(init=False)

    def __post_init__(self):
        a = _check_alpha(self.alpha)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "c_alpha", normalization_constant(a))
        mode = "closed_form_cdf" if a in _CLOSED_FORMS else "quadrature_cdf"
        object.__setattr__(self, "eval_mode", mode)

    def pdf(self, r):
        return density(self.alpha, r)

    def cdf(self, s):
        return csrd(self.alpha, s)

    def cdf_fast(self, s):
        return csrd_fast(self.alpha, s)
