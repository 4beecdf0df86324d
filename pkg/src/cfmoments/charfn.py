"""Characteristic functions: representation, constructors and difference algebra.

A :class:`CharFn` bundles a vectorized evaluator with the structural facts
the integrators exploit: radial symmetry, realness, an accurate
``phi - 1`` evaluator (the difference integrands live entirely on that
scale, and computing ``phi(xi) - 1`` by subtraction loses everything near
the origin), a decreasing modulus envelope for decaying transforms, the
exact atom list for finitely supported measures, and optional analytic
derivative / moment oracles.

Evaluators are pure and never mutate; instances are safe to share across
threads and to evaluate in parallel panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import closed_forms
from .errors import DomainError
from .measures import DiscreteMeasure, lacunary_measure
from .specfun import binomial_difference_coefficients

__all__ = [
    "CharFn",
    "make_gaussian",
    "make_stable",
    "make_linnik",
    "make_point_mass",
    "make_empirical",
    "make_discrete",
    "make_schoenberg",
    "make_product",
    "make_mixture",
    "make_scaled",
    "iterated_difference",
    "real_part_difference",
    "lacunary_measure",
    "DiscreteMeasure",
]


@dataclass(frozen=True)
class CharFn:
    """An evaluable characteristic function on R^d with metadata.

    ``minus_one`` maps an (n, d) array of points to ``phi(xi) - 1`` with
    full accuracy near the origin.  ``envelope``, when present, is a
    decreasing bound on ``sup_{|xi|=r} |phi(xi) - tail_limit|``; transforms
    of finitely supported measures carry ``atoms`` instead.
    """

    dim: int
    minus_one: Callable[[np.ndarray], np.ndarray]
    is_radial: bool
    is_real: bool
    label: str = "charfn"
    radial_minus_one: Optional[Callable[[np.ndarray], np.ndarray]] = None
    envelope: Optional[Callable[[np.ndarray], np.ndarray]] = None
    tail_limit: float = 0.0
    atoms: Optional[DiscreteMeasure] = None
    derivative: Optional[Callable[[tuple, np.ndarray], np.ndarray]] = None
    analytic_moment: Optional[Callable[[float], float]] = None
    osc_scale: float = 0.0

    def _points(self, xi) -> tuple[np.ndarray, bool]:
        pts = np.asarray(xi, dtype=float)
        scalar = pts.ndim == 0
        if scalar:
            if self.dim != 1:
                raise DomainError(f"scalar argument for a dimension-{self.dim} transform")
            pts = pts.reshape(1, 1)
        elif pts.ndim == 1:
            if self.dim == 1:
                pts = pts.reshape(-1, 1)
            elif pts.size == self.dim:
                pts = pts.reshape(1, self.dim)
                scalar = True
            else:
                raise DomainError("point dimension mismatch")
        elif pts.ndim == 2:
            if pts.shape[1] != self.dim:
                raise DomainError("point dimension mismatch")
        else:
            raise DomainError("points must be scalar, vector or (n, d) array")
        return pts, scalar

    def __call__(self, xi):
        return self.evaluate(xi)

    def evaluate(self, xi):
        """phi(xi); accepts a scalar (d=1), a point, or an (n, d) batch."""
        pts, scalar = self._points(xi)
        vals = 1.0 + np.asarray(self.minus_one(pts))
        return complex(vals[0]) if scalar else vals

    def evaluate_minus_one(self, xi):
        """phi(xi) - 1 without cancellation near the origin."""
        pts, scalar = self._points(xi)
        vals = np.asarray(self.minus_one(pts))
        return complex(vals[0]) if scalar else vals

    def profile_minus_one(self, r):
        """Radial profile minus one; defined only for radial transforms."""
        if not self.is_radial or self.radial_minus_one is None:
            raise DomainError(f"{self.label} is not radial")
        return self.radial_minus_one(np.asarray(r, dtype=float))

    def profile(self, r):
        return 1.0 + np.asarray(self.profile_minus_one(r))

    @property
    def max_atom_radius(self) -> float:
        if self.atoms is None:
            return 0.0
        return float(self.atoms.radii().max())


def _radial_charfn(dim, profile_m1, label, *, envelope=None, tail_limit=0.0,
                   atoms=None, derivative=None, analytic_moment=None):
    def minus_one(pts):
        r = np.sqrt((pts**2).sum(axis=1))
        return profile_m1(r)

    return CharFn(
        dim=dim,
        minus_one=minus_one,
        is_radial=True,
        is_real=True,
        label=label,
        radial_minus_one=profile_m1,
        envelope=envelope,
        tail_limit=tail_limit,
        atoms=atoms,
        derivative=derivative,
        analytic_moment=analytic_moment,
    )


def make_gaussian(t: float, d: int = 1) -> CharFn:
    """Transform ``exp(-t |xi|**2)`` (the N(0, 2t I) law)."""
    if t <= 0:
        raise DomainError("scale t must be positive")
    if d < 1:
        raise DomainError("dimension must be >= 1")

    def profile_m1(r):
        return np.expm1(-t * r**2)

    def deriv(sigma, pts):
        return _separable_derivative(pts, sigma, _gaussian_factor_derivs(t))

    return _radial_charfn(
        d,
        profile_m1,
        f"gaussian(t={t:g}, d={d})",
        envelope=lambda r: np.exp(-t * np.asarray(r, dtype=float) ** 2),
        derivative=deriv,
        analytic_moment=lambda a: closed_forms.stable_moment(2.0, a, d) * t ** (a / 2.0),
    )


def make_stable(p: float, t: float = 1.0, d: int = 1) -> CharFn:
    """Transform ``exp(-t |xi|**p)`` for 0 < p <= 2.

    Positive definite exactly in that exponent range; the p = 2 case
    coincides with :func:`make_gaussian`.
    """
    if not 0.0 < p <= 2.0:
        raise DomainError(f"exponent p={p} outside (0, 2]")
    if t <= 0:
        raise DomainError("scale t must be positive")
    if d < 1:
        raise DomainError("dimension must be >= 1")

    def profile_m1(r):
        return np.expm1(-t * r**p)

    def analytic_moment(a):
        return closed_forms.stable_moment(p, a, d) * t ** (a / p)

    return _radial_charfn(
        d,
        profile_m1,
        f"stable(p={p:g}, t={t:g}, d={d})",
        envelope=lambda r: np.exp(-t * np.asarray(r, dtype=float) ** p),
        derivative=None,
        analytic_moment=analytic_moment,
    )


def make_linnik(p: float, beta: float, d: int = 1) -> CharFn:
    """Transform ``(1 + |xi|**p)**-beta`` (gamma mixture of the stable family).

    The order-delta Mittag-Leffler law at time t is the special case
    ``p = delta, beta = t`` of the same formula, so no separate evaluator
    exists for it.
    """
    if not 0.0 < p <= 2.0:
        raise DomainError(f"exponent p={p} outside (0, 2]")
    if beta <= 0:
        raise DomainError("beta must be positive")
    if d < 1:
        raise DomainError("dimension must be >= 1")

    def profile_m1(r):
        return np.expm1(-beta * np.log1p(r**p))

    return _radial_charfn(
        d,
        profile_m1,
        f"linnik(p={p:g}, beta={beta:g}, d={d})",
        envelope=lambda r: (1.0 + np.asarray(r, dtype=float) ** p) ** (-beta),
        analytic_moment=lambda a: closed_forms.linnik_moment(p, beta, a, d),
    )


def make_discrete(measure: DiscreteMeasure, *, is_real: bool = False,
                  label: str = "discrete") -> CharFn:
    """Transform of a finitely supported measure, atoms carried exactly."""
    pts_T = measure.points.T  # (d, n)
    w = measure.weights

    def minus_one(pts):
        theta = pts @ pts_T  # (npts, natoms)
        re = -2.0 * np.sin(theta / 2.0) ** 2
        im = -np.sin(theta)
        return (re @ w) + 1j * (im @ w)

    def deriv(sigma, pts):
        sigma = _normalize_sigma(sigma, measure.dim)
        mono = np.prod((-1j * measure.points) ** np.asarray(sigma)[None, :], axis=1)
        phase = np.exp(-1j * (pts @ pts_T))
        return phase @ (w * mono)

    def analytic_moment(a):
        return measure.moment(a)

    origin = bool(np.all(measure.points == 0.0))
    return CharFn(
        dim=measure.dim,
        minus_one=minus_one,
        is_radial=origin,
        is_real=origin,
        label=label,
        radial_minus_one=(lambda r: np.zeros_like(np.asarray(r, dtype=float))) if origin else None,
        envelope=(lambda r: np.zeros_like(np.asarray(r, dtype=float))) if origin else None,
        tail_limit=1.0 if origin else 0.0,
        atoms=measure,
        derivative=deriv,
        analytic_moment=analytic_moment,
        osc_scale=float(measure.radii().max()),
    )


def make_point_mass(a) -> CharFn:
    """Transform ``exp(-i xi . a)`` of the unit mass at point a."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    return make_discrete(
        DiscreteMeasure(a.reshape(1, -1), np.array([1.0])),
        label=f"point_mass({np.array2string(a, precision=6)})",
    )


def make_empirical(samples) -> CharFn:
    """Empirical transform ``(1/n) sum exp(-i xi . X_j)`` of a sample set."""
    pts = np.asarray(samples, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise DomainError("need a non-empty (n, d) sample array")
    return make_discrete(
        DiscreteMeasure(pts), label=f"empirical(n={pts.shape[0]}, d={pts.shape[1]})"
    )


def make_schoenberg(mixing: DiscreteMeasure, p: float, d: int = 1) -> CharFn:
    """Discrete scale mixture ``sum w_i exp(-t_i |xi|**p)``.

    ``mixing`` must be supported on [0, inf); a mixing atom at zero
    contributes the constant 1 and shows up as the transform's limit at
    infinity rather than in the decaying envelope.
    """
    if not 0.0 < p <= 2.0:
        raise DomainError(f"exponent p={p} outside (0, 2]")
    if mixing.dim != 1:
        raise DomainError("mixing measure must live on the half line")
    t = mixing.points[:, 0]
    w = mixing.weights
    if np.any(t < 0.0):
        raise DomainError("mixing atoms must be nonnegative")
    pos = t > 0.0
    t_pos, w_pos = t[pos], w[pos]
    w_zero = float(w[~pos].sum())

    def profile_m1(r):
        r = np.asarray(r, dtype=float)
        acc = np.zeros_like(r)
        for ti, wi in zip(t_pos, w_pos):
            acc += wi * np.expm1(-ti * r**p)
        return acc

    def envelope(r):
        r = np.asarray(r, dtype=float)
        acc = np.zeros_like(r)
        for ti, wi in zip(t_pos, w_pos):
            acc += wi * np.exp(-ti * r**p)
        return acc

    def analytic_moment(a):
        return closed_forms.schoenberg_moment(t, w, p, a, d)

    return _radial_charfn(
        d,
        profile_m1,
        f"schoenberg(p={p:g}, atoms={len(t)}, d={d})",
        envelope=envelope,
        tail_limit=w_zero,
        analytic_moment=analytic_moment,
    )


def make_product(phi: CharFn, psi: CharFn) -> CharFn:
    """Pointwise product of transforms: the transform of the convolution."""
    if phi.dim != psi.dim:
        raise DomainError("dimension mismatch in product")
    radial = phi.is_radial and psi.is_radial

    def minus_one(pts):
        a = np.asarray(phi.minus_one(pts))
        b = np.asarray(psi.minus_one(pts))
        return a * b + a + b

    radial_m1 = None
    if radial:
        def radial_m1(r):
            a = np.asarray(phi.radial_minus_one(r))
            b = np.asarray(psi.radial_minus_one(r))
            return a * b + a + b

    envelope, tail_limit = _product_envelope(phi, psi)
    atoms = None
    if phi.atoms is not None and psi.atoms is not None:
        atoms = phi.atoms.convolve(psi.atoms)
    analytic = None
    if atoms is not None:
        analytic = atoms.moment
    return CharFn(
        dim=phi.dim,
        minus_one=minus_one,
        is_radial=radial,
        is_real=phi.is_real and psi.is_real,
        label=f"({phi.label})*({psi.label})",
        radial_minus_one=radial_m1,
        envelope=envelope,
        tail_limit=tail_limit,
        atoms=atoms,
        derivative=None,
        analytic_moment=analytic,
        osc_scale=phi.osc_scale + psi.osc_scale,
    )


def _product_envelope(phi, psi):
    """Envelope of |phi psi - L1 L2| from the factor envelopes.

    ``|phi psi - L1 L2| <= L1 env2 + L2 env1 + env1 env2``; a factor without
    an envelope still has modulus at most one, which keeps the product
    envelope valid whenever the other factor decays to zero.
    """
    e1, l1 = phi.envelope, phi.tail_limit
    e2, l2 = psi.envelope, psi.tail_limit
    if e1 is not None and e2 is not None:
        def env(r):
            a = np.asarray(e1(r), dtype=float)
            b = np.asarray(e2(r), dtype=float)
            return l1 * b + l2 * a + a * b

        return env, l1 * l2
    if e1 is not None and l1 == 0.0:
        return (lambda r: np.asarray(e1(r), dtype=float)), 0.0
    if e2 is not None and l2 == 0.0:
        return (lambda r: np.asarray(e2(r), dtype=float)), 0.0
    return None, 0.0


def make_mixture(components, weights) -> CharFn:
    """Convex combination of transforms: the transform of the mixture law."""
    comps = list(components)
    w = np.asarray(weights, dtype=float)
    if len(comps) != w.size or len(comps) == 0:
        raise DomainError("components and weights must match and be non-empty")
    if np.any(w <= 0.0) or abs(math.fsum(w) - 1.0) > 1e-12:
        raise DomainError("mixture weights must be positive and sum to 1")
    d = comps[0].dim
    if any(c.dim != d for c in comps):
        raise DomainError("dimension mismatch in mixture")

    def minus_one(pts):
        acc = w[0] * np.asarray(comps[0].minus_one(pts))
        for wi, c in zip(w[1:], comps[1:]):
            acc = acc + wi * np.asarray(c.minus_one(pts))
        return acc

    radial = all(c.is_radial for c in comps)
    radial_m1 = None
    if radial:
        def radial_m1(r):
            acc = w[0] * np.asarray(comps[0].radial_minus_one(r))
            for wi, c in zip(w[1:], comps[1:]):
                acc = acc + wi * np.asarray(c.radial_minus_one(r))
            return acc

    envelope = None
    tail_limit = 0.0
    if all(c.envelope is not None for c in comps):
        tail_limit = float(np.dot(w, [c.tail_limit for c in comps]))

        def envelope(r):
            acc = w[0] * np.asarray(comps[0].envelope(r), dtype=float)
            for wi, c in zip(w[1:], comps[1:]):
                acc = acc + wi * np.asarray(c.envelope(r), dtype=float)
            return acc

    atoms = None
    if all(c.atoms is not None for c in comps):
        pts = np.vstack([c.atoms.points for c in comps])
        ws = np.concatenate([wi * c.atoms.weights for wi, c in zip(w, comps)])
        atoms = DiscreteMeasure(pts, ws)
    analytic = None
    if all(c.analytic_moment is not None for c in comps):
        def analytic(a):
            return float(np.dot(w, [c.analytic_moment(a) for c in comps]))

    return CharFn(
        dim=d,
        minus_one=minus_one,
        is_radial=radial,
        is_real=all(c.is_real for c in comps),
        label="mixture(" + ", ".join(c.label for c in comps) + ")",
        radial_minus_one=radial_m1,
        envelope=envelope,
        tail_limit=tail_limit,
        atoms=atoms,
        analytic_moment=analytic,
        osc_scale=max(c.osc_scale for c in comps),
    )


def make_scaled(phi: CharFn, c: float) -> CharFn:
    """Transform of the measure scaled by c: ``xi -> phi(c xi)``."""
    if c <= 0:
        raise DomainError("scale must be positive")

    def minus_one(pts):
        return phi.minus_one(pts * c)

    radial_m1 = None
    if phi.is_radial:
        def radial_m1(r):
            return phi.radial_minus_one(np.asarray(r, dtype=float) * c)

    envelope = None
    if phi.envelope is not None:
        def envelope(r):
            return phi.envelope(np.asarray(r, dtype=float) * c)

    analytic = None
    if phi.analytic_moment is not None:
        def analytic(a):
            return c**a * phi.analytic_moment(a)

    return CharFn(
        dim=phi.dim,
        minus_one=minus_one,
        is_radial=phi.is_radial,
        is_real=phi.is_real,
        label=f"scaled({phi.label}, c={c:g})",
        radial_minus_one=radial_m1,
        envelope=envelope,
        tail_limit=phi.tail_limit,
        atoms=None if phi.atoms is None else phi.atoms.scaled(c),
        analytic_moment=analytic,
        osc_scale=c * phi.osc_scale,
    )


def iterated_difference(phi: CharFn, xi, k: int, base=None):
    """k-fold forward difference of phi with increment xi, at ``base``.

    ``sum_m binom(k,m) (-1)**(k-m) phi(base + m xi)`` including the m = 0
    term; at the origin this is the transform of ``(exp(-i xi.v) - 1)**k``.
    Terms are combined with compensated summation.
    """
    coeffs = binomial_difference_coefficients(k)
    xi_pt = np.atleast_1d(np.asarray(xi, dtype=float)).reshape(-1)
    if xi_pt.size != phi.dim:
        raise DomainError("increment dimension mismatch")
    if base is None:
        base_pt = np.zeros(phi.dim)
    else:
        base_pt = np.atleast_1d(np.asarray(base, dtype=float)).reshape(-1)
    pts = base_pt[None, :] + np.arange(k + 1)[:, None] * xi_pt[None, :]
    vals = 1.0 + np.asarray(phi.minus_one(pts))
    re = math.fsum(coeffs * vals.real)
    im = math.fsum(coeffs * vals.imag)
    return complex(re, im)


def real_part_difference(phi: CharFn, xi, k: int) -> float:
    """k-fold difference of Re(phi) at the origin.

    Differencing commutes with the real part, so this is exactly the real
    part of :func:`iterated_difference`.
    """
    return iterated_difference(phi, xi, k).real


def _normalize_sigma(sigma, dim):
    if isinstance(sigma, (int, np.integer)):
        if dim != 1:
            raise DomainError("scalar derivative order needs dimension 1")
        sigma = (int(sigma),)
    sigma = tuple(int(s) for s in sigma)
    if len(sigma) != dim or any(s < 0 for s in sigma):
        raise DomainError("derivative multi-index must be nonnegative of length d")
    return sigma


def _gaussian_factor_derivs(t):
    """Per-coordinate derivative polynomials of exp(-t x**2)."""
    from numpy.polynomial import polynomial as P

    def factor(order, x):
        # p_{m+1} = p_m' - 2 t x p_m, starting from p_0 = 1
        coeffs = np.array([1.0])
        for _ in range(order):
            dcoeffs = P.polyder(coeffs) if coeffs.size > 1 else np.array([0.0])
            shifted = np.concatenate([[0.0], -2.0 * t * coeffs])
            n = max(dcoeffs.size, shifted.size)
            coeffs = np.zeros(n)
            coeffs[: dcoeffs.size] += dcoeffs
            coeffs[: shifted.size] += shifted
        return P.polyval(x, coeffs) * np.exp(-t * x**2)

    return factor


def _separable_derivative(pts, sigma, factor):
    """Derivative of a coordinate-separable transform via per-axis factors."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    sigma = _normalize_sigma(sigma, pts.shape[1])
    acc = np.ones(pts.shape[0], dtype=complex)
    for axis, order in enumerate(sigma):
        acc = acc * factor(order, pts[:, axis])
    return acc
