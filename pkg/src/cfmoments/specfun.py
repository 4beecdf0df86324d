"""Gamma-function machinery and the closed-form constants of the moment formulas.

Everything in here is a pure function of its scalar arguments.  The module
hosts the gamma function itself, the alternating power sum that appears in
the normalizing constants, the moment constant and its reciprocal, the
closed form of the oscillatory kernel integral, the Mellin value of
``sin^2``, surface areas of unit spheres, and the asymptotic tail of
``r**(-1-alpha) * exp(i r)`` integrals used by the oscillatory tail handlers.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import DomainError

__all__ = [
    "gamma",
    "power_difference_sum",
    "moment_constant",
    "difference_integral_constant",
    "cosine_difference_integral",
    "sin_squared_mellin",
    "sphere_area",
    "mean_value_theta",
    "binomial_difference_coefficients",
    "cosine_difference_kernel",
    "cosine_difference_kernel_bound",
    "trig_power_tail",
    "MAX_DIFFERENCE_ORDER",
]

# Alternating binomial sums lose roughly one digit per order; beyond this
# cap the cancellation eats the accuracy budget.
MAX_DIFFERENCE_ORDER = 12

_INT_TOL = 1e-9

# Lanczos approximation, g = 7, 9 terms.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _is_integer(x, tol=_INT_TOL):
    return abs(x - round(x)) <= tol


def gamma(x: float) -> float:
    """Gamma function on the real line, poles excluded.

    Lanczos approximation with reflection for ``x < 0.5``; relative error
    below 1e-12 on [0.1, 50].
    """
    x = float(x)
    if x <= 0.0 and _is_integer(x, 1e-12):
        raise DomainError(f"gamma pole at non-positive integer x={x}")
    if x < 0.5:
        # reflection: gamma(x) gamma(1-x) = pi / sin(pi x)
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


def binomial_difference_coefficients(k: int) -> np.ndarray:
    """Coefficients ``binom(k, m) (-1)**(k-m)`` for m = 0..k, as exact floats."""
    if not 1 <= k <= MAX_DIFFERENCE_ORDER:
        raise DomainError(
            f"difference order k={k} outside [1, {MAX_DIFFERENCE_ORDER}]"
        )
    return np.array(
        [math.comb(k, m) * (-1) ** (k - m) for m in range(k + 1)], dtype=float
    )


def power_difference_sum(k: int, alpha: float) -> float:
    """``sum_{m=1}^{k} binom(k,m) (-1)**(k-m) m**alpha``.

    Equals the k-th forward difference of ``x**alpha`` at 0 with unit step:
    zero at integer alpha in [1, k-1], ``k!`` at alpha = k.
    """
    if alpha < 0:
        raise DomainError("power_difference_sum requires alpha >= 0")
    coeffs = binomial_difference_coefficients(k)
    if alpha == round(alpha) and 1 <= round(alpha) <= k - 1:
        return 0.0
    terms = [coeffs[m] * m**alpha for m in range(1, k + 1)]
    return math.fsum(terms)


def mean_value_theta(k: int, alpha: float) -> float:
    """Recover theta from the mean-value form of the alternating power sum.

    Solves ``sum = alpha (alpha-1) ... (alpha-k+1) (theta k)**(alpha-k)`` for
    theta.  Valid when alpha is non-integral or alpha > k; rejects arguments
    where the falling factorial is numerically zero.
    """
    s = power_difference_sum(k, alpha)
    falling = 1.0
    for j in range(k):
        falling *= alpha - j
    if abs(falling) < 1e-10:
        raise DomainError(
            f"falling factorial vanishes at k={k}, alpha={alpha}; theta undefined"
        )
    ratio = s / falling
    if ratio <= 0.0:
        raise DomainError("mean-value ratio not positive; theta undefined")
    if abs(alpha - k) < 1e-12:
        raise DomainError("alpha = k leaves theta indeterminate")
    return ratio ** (1.0 / (alpha - k)) / k


def moment_constant(k: int, alpha: float, d: int) -> float:
    """Constant relating the k-th difference integral to the alpha-moment.

    ``-sin(alpha pi/2) Gamma(alpha+1) Gamma((alpha+d)/2) /
    (pi**((d+1)/2) S Gamma((alpha+1)/2))`` with S the alternating power sum.
    Undefined at even-integer alpha (sine vanishes) and at integer alpha
    below k (S vanishes).
    """
    if d < 1:
        raise DomainError("dimension must be >= 1")
    if alpha <= 0:
        raise DomainError("order alpha must be positive")
    if _is_integer(alpha) and round(alpha) % 2 == 0:
        raise DomainError(
            f"alpha={alpha} is an even integer: excluded order, use the even-order limit"
        )
    if _is_integer(alpha) and 1 <= round(alpha) <= k - 1:
        raise DomainError(
            f"alternating power sum vanishes at integer alpha={alpha} < k={k}"
        )
    s = power_difference_sum(k, alpha)
    if s == 0.0 or not math.isfinite(s):
        raise DomainError(f"alternating power sum degenerate at k={k}, alpha={alpha}")
    num = math.sin(alpha * math.pi / 2.0) * gamma(alpha + 1.0) * gamma((alpha + d) / 2.0)
    den = math.pi ** ((d + 1) / 2.0) * s * gamma((alpha + 1.0) / 2.0)
    return -num / den


def difference_integral_constant(k: int, alpha: float, d: int) -> float:
    """Constant of the single-atom difference integral; reciprocal of
    :func:`moment_constant`.

    Computed from its own closed form so the reciprocal relationship is a
    genuine cross-check rather than a tautology.
    """
    if d < 1:
        raise DomainError("dimension must be >= 1")
    if alpha <= 0:
        raise DomainError("order alpha must be positive")
    if _is_integer(alpha) and round(alpha) % 2 == 0:
        raise DomainError(f"alpha={alpha} is an even integer: excluded order")
    if _is_integer(alpha) and 1 <= round(alpha) <= k - 1:
        raise DomainError(
            f"alternating power sum vanishes at integer alpha={alpha} < k={k}"
        )
    s = power_difference_sum(k, alpha)
    num = math.pi ** ((d + 1) / 2.0) * s * gamma((alpha + 1.0) / 2.0)
    den = math.sin(alpha * math.pi / 2.0) * gamma(alpha + 1.0) * gamma((alpha + d) / 2.0)
    return -num / den


def cosine_difference_integral(k: int, alpha: float) -> float:
    """Closed value of ``int_0^inf r**(-1-alpha) E_k(r) dr`` where
    ``E_k(r) = (exp(-ir)-1)**k + (exp(ir)-1)**k``.

    Valid for 0 < alpha < k+1 when k is odd and 0 < alpha < k when k is
    even.  Zero at integer alpha in [1, k-1]; ``(-1)**((k+1)/2) pi`` at
    alpha = k for odd k.
    """
    upper = k + 1 if k % 2 == 1 else k
    if not 0.0 < alpha < upper:
        raise DomainError(
            f"alpha={alpha} outside the convergence range (0, {upper}) for k={k}"
        )
    if _is_integer(alpha):
        n = round(alpha)
        if 1 <= n <= k - 1:
            return 0.0
        if n == k and k % 2 == 1:
            return (-1.0) ** ((k + 1) // 2) * math.pi
    s = power_difference_sum(k, alpha)
    return -math.pi * s / (math.sin(math.pi * alpha / 2.0) * gamma(alpha + 1.0))


def sin_squared_mellin(delta: float) -> float:
    """``int_0^inf r**(-2-delta) sin(r)**2 dr`` for -1 < delta < 1.

    The removable singularity at delta = 0 takes its limiting value pi/2.
    """
    if not -1.0 < delta < 1.0:
        raise DomainError(f"delta={delta} outside (-1, 1)")
    if delta == 0.0:
        return math.pi / 2.0
    return (
        2.0**delta
        * gamma(1.0 - delta)
        / (delta * (1.0 + delta))
        * math.sin(math.pi * delta / 2.0)
    )


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d; the d = 1 convention is 2."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    if d == 1:
        return 2.0
    return 2.0 * math.pi ** (d / 2.0) / gamma(d / 2.0)


def cosine_difference_kernel(k: int, r):
    """``E_k(r) = (exp(-ir)-1)**k + (exp(ir)-1)**k`` in cancellation-free form.

    ``(-1)**((k+1)/2) 2**(k+1) sin(r/2)**k sin(kr/2)`` for odd k and
    ``(-1)**(k/2) 2**(k+1) sin(r/2)**k cos(kr/2)`` for even k.
    """
    r = np.asarray(r, dtype=float)
    half = np.sin(r / 2.0)
    if k % 2 == 1:
        return (-1.0) ** ((k + 1) // 2) * 2.0 ** (k + 1) * half**k * np.sin(k * r / 2.0)
    return (-1.0) ** (k // 2) * 2.0 ** (k + 1) * half**k * np.cos(k * r / 2.0)


def cosine_difference_kernel_bound(k: int, r):
    """Pointwise bound on ``|E_k|``: ``min(2**(k+1), k r**(k+1))`` for odd k,
    ``min(2**(k+1), 2 r**k)`` for even k."""
    r = np.asarray(r, dtype=float)
    if k % 2 == 1:
        return np.minimum(2.0 ** (k + 1), k * r ** (k + 1))
    return np.minimum(2.0 ** (k + 1), 2.0 * r**k)


def trig_power_tail(y: float, alpha: float, tol: float = 1e-16):
    """Asymptotic value of ``int_y^inf u**(-1-alpha) exp(iu) du``.

    Repeated integration by parts unrolls the integral into
    ``exp(iy) sum_j c_j y**(-nu-j)`` with nu = 1 + alpha, c_0 = i and
    ``c_{j+1} = -i (nu+j) c_j``.  The remainder after the j-th term is
    bounded by that term's magnitude, so the series is summed while terms
    decrease and cut at the smallest one.  Returns ``(value, bound)``.
    Useful once ``y >~ nu``; callers bridge smaller y by quadrature.
    """
    if y <= 0.0:
        raise DomainError("trig_power_tail requires y > 0")
    nu = 1.0 + alpha
    acc = 0.0 + 0.0j
    coeff = 1j
    prev_mag = math.inf
    bound = y ** (1.0 - nu) / max(nu - 1.0, 1e-300)
    for j in range(200):
        term = coeff * y ** (-nu - j)
        mag = abs(term)
        if mag >= prev_mag:
            break
        acc += term
        bound = mag
        prev_mag = mag
        if mag < tol * max(abs(acc), 1e-300):
            break
        coeff *= -1j * (nu + j)
    return cmath.exp(1j * y) * acc, bound
