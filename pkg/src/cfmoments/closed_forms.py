"""Closed-form moment and density formulas for the built-in families.

These serve both as user-facing calculators and as the ground truth that
the quadrature engine is tested against.  All formulas are rational
combinations of gamma values; validity ranges are enforced with typed
errors rather than silent garbage.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, SeriesDivergenceError
from .specfun import gamma

__all__ = [
    "stable_moment",
    "stable_moment_edge",
    "stable_density",
    "stable_tail_constant",
    "linnik_moment",
    "schoenberg_moment",
    "mittag_leffler_moment",
    "mittag_leffler_process_moment",
    "gamma_mixing_atoms",
]


def _check_p(p: float):
    if not 0.0 < p <= 2.0:
        raise DomainError(f"exponent p={p} outside (0, 2]")


def stable_moment(p: float, alpha: float, d: int = 1) -> float:
    """Absolute moment of order alpha of the isotropic density with
    transform ``exp(-|xi|**p)``.

    ``2**alpha Gamma(1-alpha/p) Gamma((alpha+d)/2) /
    (Gamma(1-alpha/2) Gamma(d/2))`` for ``0 <= alpha < p < 2``; for p = 2
    the Gaussian value ``2**alpha Gamma((alpha+d)/2) / Gamma(d/2)`` holds
    at every order.
    """
    _check_p(p)
    if d < 1:
        raise DomainError("dimension must be >= 1")
    if alpha < 0:
        raise DomainError("order must be nonnegative")
    if alpha == 0:
        return 1.0
    if p == 2.0:
        return 2.0**alpha * gamma((alpha + d) / 2.0) / gamma(d / 2.0)
    if alpha >= p:
        raise DomainError(
            f"order {alpha} >= p={p}: only orders below p are finite"
        )
    return (
        2.0**alpha
        * gamma(1.0 - alpha / p)
        * gamma((alpha + d) / 2.0)
        / (gamma(1.0 - alpha / 2.0) * gamma(d / 2.0))
    )


def stable_moment_edge(p: float, alpha: float, d: int = 1) -> float:
    """Blow-up asymptote of :func:`stable_moment` as alpha approaches p.

    ``2**p Gamma((p+d)/2) / (Gamma(1-p/2) Gamma(d/2)) * (1 - alpha/p)**-1``.
    """
    _check_p(p)
    if p == 2.0:
        raise DomainError("p = 2 has no moment blow-up")
    if not 0.0 <= alpha < p:
        raise DomainError("need 0 <= alpha < p")
    lead = 2.0**p * gamma((p + d) / 2.0) / (gamma(1.0 - p / 2.0) * gamma(d / 2.0))
    return lead / (1.0 - alpha / p)


def stable_density(p: float, v, d: int = 1, terms: int = 64, method: str = "auto") -> float:
    """Density at v of the isotropic law with transform ``exp(-|xi|**p)``.

    Closed forms at p = 1 (isotropic Cauchy) and p = 2 (heat kernel at unit
    time); otherwise the radial power series in |v| with gamma-ratio
    coefficients.  For p > 1 the series is entire; at p = 1 it converges
    only for |v| < 1; for p < 1 the coefficients grow factorially and the
    series is truncated at its smallest term.  When the truncation error
    cannot reach tolerance the call errors instead of returning garbage.
    ``method='series'`` forces the series even where a closed form exists.
    """
    _check_p(p)
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.ndim == 1 and v.size == d:
        r = float(np.sqrt((v**2).sum()))
    elif v.size == 1:
        r = abs(float(v[0]))
    else:
        raise DomainError("v must be a point in R^d or a scalar radius")
    if method not in ("auto", "series"):
        raise DomainError("method must be 'auto' or 'series'")
    if method == "auto":
        if p == 2.0:
            return (4.0 * math.pi) ** (-d / 2.0) * math.exp(-(r**2) / 4.0)
        if p == 1.0:
            return gamma((d + 1) / 2.0) * (math.pi * (1.0 + r**2)) ** (-(d + 1) / 2.0)
    if terms < 4:
        raise DomainError("need at least 4 series terms")
    ms = np.arange(terms)
    # log magnitudes keep the gamma ratios in floating range
    logmag = np.array([
        math.lgamma((2 * m + d) / p) - math.lgamma(m + 1) - math.lgamma((2 * m + d) / 2.0)
        for m in ms
    ])
    if r > 0.0:
        logmag = logmag + 2.0 * ms * math.log(r / 2.0)
    else:
        logmag = np.where(ms == 0, logmag, -np.inf)
    if p < 1.0:
        # asymptotic regime: usable only up to the smallest term
        cut = int(np.argmin(logmag)) + 1
    else:
        if p == 1.0 and r >= 1.0:
            raise SeriesDivergenceError(
                f"series radius is 1 at p=1; |v|={r:g} is outside it"
            )
        cut = terms
    kept = logmag[:cut]
    signs = (-1.0) ** ms[:cut]
    total = math.fsum(signs * np.exp(kept))
    trunc = math.exp(logmag[cut]) if cut < terms else math.exp(logmag[-1])
    if trunc > 1e-8 * max(abs(total), 1e-300):
        raise SeriesDivergenceError(
            f"series truncation error {trunc:.2e} too large at |v|={r:g}, p={p:g}; "
            "decay sets in too late for the requested term budget"
        )
    return 2.0 * (4.0 * math.pi) ** (-d / 2.0) / p * total


def stable_tail_constant(p: float, d: int = 1) -> float:
    """Limit of ``|v|**(d+p)`` times the density of :func:`stable_density`.

    ``p 2**(p-1) / pi**(d/2+1) * sin(p pi/2) Gamma((d+p)/2) Gamma(p/2)``.
    """
    if not 0.0 < p < 2.0:
        raise DomainError("tail constant defined for 0 < p < 2")
    if d < 1:
        raise DomainError("dimension must be >= 1")
    return (
        p
        * 2.0 ** (p - 1.0)
        / math.pi ** (d / 2.0 + 1.0)
        * math.sin(p * math.pi / 2.0)
        * gamma((d + p) / 2.0)
        * gamma(p / 2.0)
    )


def linnik_moment(p: float, beta: float, alpha: float, d: int = 1) -> float:
    """Absolute moment of the law with transform ``(1+|xi|**p)**-beta``.

    Gamma mixture of the stable family: :func:`stable_moment` times
    ``Gamma(beta + alpha/p) / Gamma(beta)``.  Requires ``alpha < p`` when
    p < 2; any order when p = 2.
    """
    if beta <= 0:
        raise DomainError("beta must be positive")
    base = stable_moment(p, alpha, d)
    if alpha == 0:
        return 1.0
    return base * gamma(beta + alpha / p) / gamma(beta)


def schoenberg_moment(t_atoms, weights, p: float, alpha: float, d: int = 1) -> float:
    """Moment of a discrete scale mixture ``sum w_i exp(-t_i |xi|**p)``.

    :func:`stable_moment` times the exact mixture factor
    ``sum w_i t_i**(alpha/p)``.
    """
    t = np.asarray(t_atoms, dtype=float)
    w = np.asarray(weights, dtype=float)
    if t.shape != w.shape or t.ndim != 1:
        raise DomainError("mixing atoms and weights must be matching 1-d arrays")
    if np.any(t < 0.0) or np.any(w <= 0.0):
        raise DomainError("mixing atoms must be >= 0 with positive weights")
    base = stable_moment(p, alpha, d)
    return base * float(math.fsum(w * t ** (alpha / p)))


def mittag_leffler_moment(delta: float, alpha: float) -> float:
    """Fractional moment ``Gamma(1-alpha/delta) Gamma(1+alpha/delta) /
    Gamma(1-alpha)`` of the Mittag-Leffler law, 0 <= alpha < delta <= 1."""
    if not 0.0 < delta <= 1.0:
        raise DomainError("delta must lie in (0, 1]")
    if not 0.0 <= alpha < delta:
        raise DomainError(f"order {alpha} outside [0, {delta})")
    if alpha == 0.0:
        return 1.0
    return gamma(1.0 - alpha / delta) * gamma(1.0 + alpha / delta) / gamma(1.0 - alpha)


def mittag_leffler_process_moment(delta: float, t: float, alpha: float) -> float:
    """Moment of the order-delta process at time t:
    ``Gamma(1-alpha/delta) Gamma(t+alpha/delta) / (Gamma(1-alpha) Gamma(t))``."""
    if t <= 0.0:
        raise DomainError("time must be positive")
    if not 0.0 < delta <= 1.0:
        raise DomainError("delta must lie in (0, 1]")
    if not 0.0 <= alpha < delta:
        raise DomainError(f"order {alpha} outside [0, {delta})")
    if alpha == 0.0:
        return 1.0
    return (
        gamma(1.0 - alpha / delta)
        * gamma(t + alpha / delta)
        / (gamma(1.0 - alpha) * gamma(t))
    )


def gamma_mixing_atoms(beta: float, n: int):
    """Quantile-grid discretization of the Gamma(beta, 1) mixing measure.

    Returns ``(t_atoms, weights)`` with equal weights at mid-quantiles,
    ready for :func:`schoenberg_moment` or the mixture transform builder.
    """
    from scipy.stats import gamma as gamma_dist

    if beta <= 0:
        raise DomainError("beta must be positive")
    if n < 2:
        raise DomainError("need at least two atoms")
    qs = (np.arange(n) + 0.5) / n
    t = gamma_dist.ppf(qs, beta)
    w = np.full(n, 1.0 / n)
    return t, w
