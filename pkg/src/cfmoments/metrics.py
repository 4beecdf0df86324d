"""Transform-side probability metrics, seminorms and the membership classifier.

Sup-type quantities (uniform distance, Holder-weighted distance) are grid
suprema over logarithmic radii times sphere directions with one local
refinement pass; true suprema over R^d are not computable and every result
carries its grid report so callers can tighten.  Integral-type seminorms
ride on the moment engine's difference integrator with the absolute value
taken inside the angular mean.  The membership classifier combines three
signals: the near-origin growth exponent, stabilization of the truncated
integral under increasing cutoffs, and sign consistency of the implied
moment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .charfn import CharFn, make_point_mass
from .errors import DivergenceSuspectedError, DomainError
from .moment_engine import (
    _BareProblem,
    _difference_integral,
    _sphere_rule,
    absolute_moment,
)
from .quadrature import QuadratureSpec, adaptive_panel_integral, trig_tail_integral
from .specfun import (
    binomial_difference_coefficients,
    difference_integral_constant,
    sphere_area,
)

__all__ = [
    "GridSpec",
    "MetricResult",
    "MembershipReport",
    "sup_distance",
    "holder_distance",
    "holder_seminorm",
    "difference_holder_sup",
    "difference_seminorm",
    "integral_distance",
    "composite_metric",
    "membership",
    "derivative_seminorm",
]

_ONE = {}


def _const_one(d):
    if d not in _ONE:
        _ONE[d] = make_point_mass(np.zeros(d))
    return _ONE[d]


@dataclass
class GridSpec:
    """Evaluation grid for sup-type metrics."""

    n_radial: int = 96
    r_min: float = 1e-6
    r_max: float = 1e6
    sphere_order: int = 32
    refine_nodes: int = 32

    def __post_init__(self):
        if not 0 < self.r_min < self.r_max:
            raise DomainError("need 0 < r_min < r_max")
        if self.n_radial < 8 or self.refine_nodes < 4:
            raise DomainError("grid too coarse")


@dataclass
class MetricResult:
    """Metric value with its component breakdown and grid diagnostics."""

    value: float
    sup_component: float = 0.0
    integral_component: float = 0.0
    grid_report: dict = field(default_factory=dict)


@dataclass
class MembershipReport:
    """Classification of a transform against a finite-moment class."""

    classification: str            # finite | divergence-suspected
    integral_value: float | None
    origin_slope: float | None
    tail_contribution: float | None
    details: dict = field(default_factory=dict)


def _pair_magnitude(phi, psi, pts):
    a = np.asarray(phi.minus_one(pts))
    if psi is None:
        return np.abs(a)
    return np.abs(a - np.asarray(psi.minus_one(pts)))


def _grid_sup(phi, psi, weight_exponent, grid):
    """Sup of |phi - psi| / r**weight_exponent over the grid, refined once."""
    d = phi.dim
    radii = np.geomspace(grid.r_min, grid.r_max, grid.n_radial)
    nodes, _ = _sphere_rule(d, grid.sphere_order) if d > 1 else (np.array([[1.0]]), None)
    best = -1.0
    best_r_idx = 0
    best_node = nodes[0]
    for node in nodes:
        pts = radii[:, None] * node[None, :]
        vals = _pair_magnitude(phi, psi, pts) / radii**weight_exponent
        i = int(np.argmax(vals))
        if vals[i] > best:
            best = float(vals[i])
            best_r_idx = i
            best_node = node
    lo = radii[max(best_r_idx - 1, 0)]
    hi = radii[min(best_r_idx + 1, radii.size - 1)]
    fine = np.geomspace(lo, hi, grid.refine_nodes)
    pts = fine[:, None] * best_node[None, :]
    vals = _pair_magnitude(phi, psi, pts) / fine**weight_exponent
    refined = float(vals.max())
    i_fine = int(np.argmax(vals))
    report = {
        "n_radial": grid.n_radial,
        "n_angular": len(nodes),
        "refine_nodes": grid.refine_nodes,
        "argmax_radius": float(fine[i_fine]) if refined >= best else float(radii[best_r_idx]),
        "refined_gain": max(refined - best, 0.0),
    }
    return max(best, refined), report


def sup_distance(phi: CharFn, psi: CharFn, grid: GridSpec | None = None) -> MetricResult:
    """Uniform distance ``sup |phi - psi|`` over the evaluation grid."""
    if phi.dim != psi.dim:
        raise DomainError("dimension mismatch")
    grid = grid or GridSpec()
    val, report = _grid_sup(phi, psi, 0.0, grid)
    return MetricResult(val, sup_component=val, grid_report=report)


def holder_distance(phi: CharFn, psi: CharFn, beta: float,
                    grid: GridSpec | None = None) -> MetricResult:
    """Weighted sup ``sup |phi - psi| / |xi|**beta`` for 0 < beta < 2.

    At beta >= 2 only the constant transform keeps the functional finite
    (the weighted class degenerates to a singleton), so that range errors.
    """
    if phi.dim != psi.dim:
        raise DomainError("dimension mismatch")
    if not 0.0 < beta < 2.0:
        raise DomainError(
            f"beta={beta} outside (0, 2): the weighted sup class degenerates "
            "at beta >= 2"
        )
    grid = grid or GridSpec()
    val, report = _grid_sup(phi, psi, beta, grid)
    return MetricResult(val, sup_component=val, grid_report=report)


def holder_seminorm(phi: CharFn, beta: float, grid: GridSpec | None = None) -> float:
    """``sup |Delta_xi phi(0)| / |xi|**beta`` (distance to the constant 1)."""
    return holder_distance(phi, _const_one(phi.dim), beta, grid).value


def difference_holder_sup(phi: CharFn, k: int, beta: float,
                          grid: GridSpec | None = None) -> float:
    """Grid sup of ``|Delta_xi^k phi(0)| / |xi|**beta``."""
    if not 0.0 < beta <= k:
        raise DomainError("need 0 < beta <= k")
    grid = grid or GridSpec()
    coeffs = binomial_difference_coefficients(k)
    d = phi.dim
    radii = np.geomspace(grid.r_min, grid.r_max, grid.n_radial)
    nodes, _ = _sphere_rule(d, grid.sphere_order) if d > 1 else (np.array([[1.0]]), None)
    best = 0.0
    for node in nodes:
        acc = np.zeros(radii.size, dtype=complex)
        for m in range(1, k + 1):
            pts = (m * radii)[:, None] * node[None, :]
            acc += coeffs[m] * np.asarray(phi.minus_one(pts))
        best = max(best, float((np.abs(acc) / radii**beta).max()))
    return best


def _assemble_pair_problem(phi: CharFn, psi: CharFn | None, k: int,
                           spec: QuadratureSpec, real_part: bool) -> _BareProblem:
    """|Delta^k (phi - psi)| reduced over the sphere, with tail structure.

    ``psi=None`` means the constant transform, which makes this the
    membership integrand: differences annihilate constants, so only the
    tail limit shifts.
    """
    from .moment_engine import _check_tail_mode

    coeffs = binomial_difference_coefficients(k)
    d = phi.dim
    if psi is not None and psi.dim != d:
        raise DomainError("dimension mismatch")
    _check_tail_mode(spec, phi)
    c0 = coeffs[0]
    l_phi = phi.tail_limit if phi.envelope is not None else None
    if psi is None:
        l_psi = 1.0
    else:
        l_psi = psi.tail_limit if psi.envelope is not None else None

    def pair_m1(pts):
        a = np.asarray(phi.minus_one(pts))
        if psi is None:
            return a
        return a - np.asarray(psi.minus_one(pts))

    both_radial = phi.is_radial and (psi is None or psi.is_radial)
    if both_radial:
        def delta(r):
            r = np.asarray(r, dtype=float)
            g = phi.radial_minus_one
            h = None if psi is None else psi.radial_minus_one
            acc = np.zeros(r.shape, dtype=complex)
            for m in range(1, k + 1):
                term = np.asarray(g(m * r))
                if h is not None:
                    term = term - np.asarray(h(m * r))
                acc = acc + coeffs[m] * term
            return acc

        def D(r):
            vals = delta(r)
            return np.abs(np.real(vals)) if real_part else np.abs(vals)

        def noise_proxy(r):
            r = np.asarray(r, dtype=float)
            g = phi.radial_minus_one
            h = None if psi is None else psi.radial_minus_one
            acc = np.zeros(r.shape)
            for m in range(1, k + 1):
                acc = acc + abs(coeffs[m]) * np.abs(np.asarray(g(m * r)))
                if h is not None:
                    acc = acc + abs(coeffs[m]) * np.abs(np.asarray(h(m * r)))
            return acc
    elif d <= 3:
        nodes, node_w = _sphere_rule(d, spec.sphere_order)
        area = sphere_area(d)

        def D(r):
            r = np.asarray(r, dtype=float)
            acc = np.zeros((r.size, nodes.shape[0]), dtype=complex)
            for m in range(1, k + 1):
                pts = (m * r)[:, None, None] * nodes[None, :, :]
                acc += coeffs[m] * np.asarray(pair_m1(pts.reshape(-1, d))).reshape(r.size, -1)
            mags = np.abs(np.real(acc)) if real_part else np.abs(acc)
            return (mags @ node_w) / area

        def noise_proxy(r):
            r = np.asarray(r, dtype=float)
            acc = np.zeros(r.size)
            for m in range(1, k + 1):
                pts = (m * r)[:, None, None] * nodes[None, :, :]
                flat = pts.reshape(-1, d)
                mag = np.abs(np.asarray(phi.minus_one(flat)))
                if psi is not None:
                    mag = mag + np.abs(np.asarray(psi.minus_one(flat)))
                acc = acc + abs(coeffs[m]) * (mag.reshape(r.size, -1) @ node_w)
            return acc / area
    else:
        raise DomainError("non-radial seminorms are limited to dimension 3")

    # limiting constant of Delta^k(phi - psi); unknown decay means None
    if l_phi is None or l_psi is None:
        d_inf = 0.0
        tail_kind = "stabilize"
        envelope = None
    else:
        d_inf = -c0 * (l_phi - l_psi)
        tail_kind = "envelope"
        e1 = phi.envelope
        e2 = None if psi is None else psi.envelope

        def envelope(r):
            acc = np.asarray(e1(r), dtype=float)
            if e2 is not None:
                acc = acc + np.asarray(e2(r), dtype=float)
            return acc

    atoms_pair = phi.atoms is not None and (psi is None or psi.atoms is not None)
    if atoms_pair and tail_kind == "stabilize":
        tail_kind = "abs-atomic"
    freq = k * (phi.osc_scale + (psi.osc_scale if psi is not None else 0.0))
    return _BareProblem(
        D=D,
        angular=sphere_area(d),
        d_inf=d_inf,
        freq=float(freq),
        tail_kind={"abs-atomic": "atomic"}.get(tail_kind, tail_kind),
        envelope=envelope,
        noise_proxy=noise_proxy,
    )


def _sin_pair_structure(phi, psi, k):
    """Detect |Delta(phi-psi)| = amp * 2|sin(c r / 2)| (two unit atoms, k=1)."""
    if k != 1 or phi.dim != 1:
        return None
    if phi.atoms is None or phi.atoms.size != 1:
        return None
    a = float(phi.atoms.points[0, 0])
    if psi is None:
        b = 0.0
    else:
        if psi.atoms is None or psi.atoms.size != 1:
            return None
        b = float(psi.atoms.points[0, 0])
    c = abs(a - b)
    if c == 0.0:
        return None
    return c


def _sin_tail(c: float, alpha: float, R: float, n_terms: int = 64):
    """``int_R^inf r**(-1-alpha) 2|sin(c r / 2)| dr`` via the Fourier series
    of |sin|; returns (value, error bound)."""
    val = (4.0 / math.pi) * R ** (-alpha) / alpha
    err = 0.0
    for n in range(1, n_terms + 1):
        t, te = trig_tail_integral(n * c * R, alpha)
        val -= (8.0 / math.pi) * (n * c) ** alpha * t / (4.0 * n**2 - 1.0)
        err += (8.0 / math.pi) * (n * c) ** alpha * te / (4.0 * n**2 - 1.0)
    n = n_terms
    err += (16.0 / math.pi) / max(c * R, 1e-300) * R ** (-alpha) / (8.0 * n**2)
    return val, err


def difference_seminorm(phi: CharFn, psi: CharFn, alpha: float, k: int,
                        spec: QuadratureSpec | None = None, *,
                        real_part: bool = False) -> MetricResult:
    """``int |Delta_xi^k (phi - psi)(0)| / |xi|**(d+alpha) dxi``.

    A pseudo-metric: it vanishes whenever the transforms agree.  With
    ``real_part=True`` the difference of the real parts is used instead.
    Raises :class:`DivergenceSuspectedError` when the integrand's origin
    growth cannot support the weight.
    """
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    if k < 1:
        raise DomainError("k must be at least 1")
    spec = spec or QuadratureSpec()
    sin_c = _sin_pair_structure(phi, psi, k)
    problem = _assemble_pair_problem(phi, psi, k, spec, real_part)
    if sin_c is not None and not real_part:
        problem.tail_exact = lambda a, R: _sin_tail(sin_c, a, R)
    value, error, diag = _difference_integral(
        problem, k, alpha, spec, abs_mode=True
    )
    total = problem.angular * float(np.real(value))
    diag["integral_error"] = problem.angular * error
    return MetricResult(
        max(total, 0.0),
        integral_component=max(total, 0.0),
        grid_report=diag,
    )


def integral_distance(phi: CharFn, psi: CharFn, alpha: float,
                      spec: QuadratureSpec | None = None) -> MetricResult:
    """``int |phi - psi| / |xi|**(d+alpha) dxi`` for 0 < alpha < 1.

    Exactly the first-difference seminorm: the k = 1 difference of a
    transform pair at the origin is the pair difference itself.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("integral distance requires 0 < alpha < 1")
    return difference_seminorm(phi, psi, alpha, 1, spec)


_COMPOSITE_KINDS = ("D", "F", "G", "H")


def composite_metric(kind: str, phi: CharFn, psi: CharFn, alpha: float,
                     beta: float | None = None, k: int = 1,
                     spec: QuadratureSpec | None = None,
                     grid: GridSpec | None = None) -> MetricResult:
    """The four composite metrics: a sup part plus a difference seminorm.

    ``D``: uniform + seminorm; ``F``: Holder + seminorm; ``G``: uniform +
    real-part seminorm; ``H``: Holder + real-part seminorm.  The Holder
    variants require ``0 < beta <= min(alpha, 1)``; the real-part variants
    at integer ``alpha = k`` require odd k.
    """
    if kind not in _COMPOSITE_KINDS:
        raise DomainError(f"kind must be one of {_COMPOSITE_KINDS}")
    if kind in ("F", "H"):
        if beta is None or not 0.0 < beta <= min(alpha, 1.0):
            raise DomainError(
                f"kind {kind} requires 0 < beta <= min(alpha, 1); got beta={beta}"
            )
    real_part = kind in ("G", "H")
    if real_part and abs(alpha - round(alpha)) < 1e-9 and round(alpha) == k and k % 2 == 0:
        raise DomainError("integer alpha = k in a real-part metric needs odd k")
    if kind in ("D", "G"):
        sup = sup_distance(phi, psi, grid)
    else:
        sup = holder_distance(phi, psi, beta, grid)
    semi = difference_seminorm(phi, psi, alpha, k, spec, real_part=real_part)
    report = {"sup": sup.grid_report, "seminorm": semi.grid_report}
    return MetricResult(
        sup.value + semi.value,
        sup_component=sup.value,
        integral_component=semi.value,
        grid_report=report,
    )


def membership(phi: CharFn, alpha: float, k: int,
               spec: QuadratureSpec | None = None) -> MembershipReport:
    """Classify whether the difference integral marks a finite alpha-moment.

    Three diagnostics: a least-squares origin exponent over the innermost
    panels (a slope at most alpha means the head diverges), stabilization
    of the truncated integral under doubling cutoffs, and sign consistency
    of the moment implied by the signed formula.  Numeric classification is
    inherently heuristic; the verdict says "suspected", not "proved".
    """
    spec = spec or QuadratureSpec()
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    problem = _assemble_pair_problem(phi, None, k, spec, real_part=(k % 2 == 1))
    details = {}

    # least-squares origin exponent over the innermost dyadic panels
    a = spec.origin_cut
    if problem.freq > 0.0:
        a = min(a, 0.25 / problem.freq)
    rs = a * 0.5 ** np.arange(8)
    mags = np.abs(np.asarray(problem.D(rs)))
    slope = None
    if np.all(mags > 0.0):
        coef = np.polyfit(np.log(rs), np.log(mags), 1)
        slope = float(coef[0])
    details["slope_margin"] = 0.05
    if slope is not None and slope <= alpha + 0.05:
        return MembershipReport(
            "divergence-suspected", None, slope, None,
            {**details, "reason": "origin exponent at or below alpha"},
        )

    try:
        value, error, diag = _difference_integral(
            problem, k, alpha, spec, abs_mode=True,
            slope_margin=0.05, raise_on_divergence=True,
        )
    except DivergenceSuspectedError as exc:
        return MembershipReport(
            "divergence-suspected", None, slope, None,
            {**details, "reason": str(exc)},
        )
    if not np.isfinite(error):
        return MembershipReport(
            "divergence-suspected", None, slope, None,
            {**details, "reason": "difference integral did not resolve numerically"},
        )
    integral_value = problem.angular * float(np.real(value))

    # stabilization under doubling cutoffs
    R = diag["tail_start"]

    def truncated_increment(lo, hi):
        def f(r):
            return r ** (-1.0 - alpha) * np.abs(np.asarray(problem.D(r)))

        from .quadrature import oscillatory_breakpoints

        bp = oscillatory_breakpoints(lo, hi, problem.freq, per_octave=3)
        v, _, _, _ = adaptive_panel_integral(f, bp, 1e-6, spec.abs_tol, spec.max_panels)
        return float(np.real(v))

    inc1 = truncated_increment(R, 2.0 * R)
    inc2 = truncated_increment(2.0 * R, 4.0 * R)
    details["cutoff_increments"] = [inc1, inc2]
    if inc2 > 1.05 * inc1 + spec.abs_tol:
        return MembershipReport(
            "divergence-suspected", None, slope,
            problem.angular * diag["tail_value"],
            {**details, "reason": "truncated integral keeps growing"},
        )

    # sign consistency of the implied moment
    formula = "M13" if k % 2 == 1 else "M12"
    try:
        mom = absolute_moment(phi, alpha, spec, k=k, formula=formula)
        details["implied_moment"] = mom.value
        details["moment_upper_bound"] = integral_value / abs(
            difference_integral_constant(k, alpha, phi.dim)
        )
    except DivergenceSuspectedError as exc:
        return MembershipReport(
            "divergence-suspected", integral_value, slope,
            problem.angular * diag["tail_value"],
            {**details, "reason": f"signed formula inconsistent: {exc}"},
        )
    return MembershipReport(
        "finite",
        integral_value,
        slope,
        problem.angular * diag["tail_value"],
        details,
    )


def derivative_seminorm(phi: CharFn, sigma, gamma: float,
                        spec: QuadratureSpec | None = None) -> float:
    """``int |partial^sigma phi(xi) - partial^sigma phi(0)| / |xi|**(d+gamma) dxi``.

    Requires the transform to expose an analytic derivative oracle.  The
    order-zero case reduces to the first-difference integral distance.
    """
    if not 0.0 < gamma < 1.0:
        raise DomainError("gamma must lie in (0, 1)")
    spec = spec or QuadratureSpec()
    if isinstance(sigma, (int, np.integer)):
        sigma = (int(sigma),)
    sigma = tuple(int(s) for s in sigma)
    if all(s == 0 for s in sigma):
        return integral_distance(phi, _const_one(phi.dim), gamma, spec).value
    if phi.derivative is None:
        raise DomainError(f"{phi.label} carries no derivative oracle")
    d = phi.dim
    order = sum(sigma)
    base = complex(np.asarray(phi.derivative(sigma, np.zeros((1, d))))[0])
    nodes, node_w = _sphere_rule(d, spec.sphere_order)
    area = sphere_area(d)

    def D(r):
        r = np.asarray(r, dtype=float)
        pts = r[:, None, None] * nodes[None, :, :]
        vals = np.asarray(phi.derivative(sigma, pts.reshape(-1, d))).reshape(r.size, -1)
        return (np.abs(vals - base) @ node_w) / area

    tail_exact = None
    if phi.atoms is not None and phi.atoms.size == 1 and d == 1:
        # single atom at a: |phi^(m)(xi) - phi^(m)(0)| = |a|**m 2|sin(a xi/2)|
        c = abs(float(phi.atoms.points[0, 0]))
        if c > 0.0:
            amp = c**order

            def tail_exact(g, R):
                t, te = _sin_tail(c, g, R)
                return amp * t, amp * te

    problem = _BareProblem(
        D=D,
        angular=area,
        d_inf=abs(base),
        freq=float(phi.osc_scale),
        tail_kind="stabilize",
        envelope=None,
        tail_exact=tail_exact,
    )
    value, error, diag = _difference_integral(problem, 1, gamma, spec, abs_mode=True)
    return max(problem.angular * float(np.real(value)), 0.0)
