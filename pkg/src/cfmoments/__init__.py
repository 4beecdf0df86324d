"""Moments, metrics, and diffusion checks for probability laws, computed
from their characteristic functions.

The central identity: the absolute moment of order alpha is an explicit
constant times the integral of the k-fold forward difference of the
transform at the origin against ``|xi|**-(d+alpha)``.  On top of that sit
transform-side probability metrics, a membership classifier for the
finite-moment classes, convolution moment bounds, and the transform-side
treatment of fractional heat flow.
"""

from .charfn import (
    CharFn,
    DiscreteMeasure,
    iterated_difference,
    lacunary_measure,
    make_discrete,
    make_empirical,
    make_gaussian,
    make_linnik,
    make_mixture,
    make_point_mass,
    make_product,
    make_scaled,
    make_schoenberg,
    make_stable,
    real_part_difference,
)
from .closed_forms import (
    gamma_mixing_atoms,
    linnik_moment,
    mittag_leffler_moment,
    mittag_leffler_process_moment,
    schoenberg_moment,
    stable_density,
    stable_moment,
    stable_moment_edge,
    stable_tail_constant,
)
from .convolution import (
    ConvolutionBoundReport,
    convolution_bound_report,
    convolution_moment,
    leibniz_difference,
)
from .errors import (
    DivergenceSuspectedError,
    DomainError,
    QuadratureError,
    SeriesDivergenceError,
)
from .heat import (
    DecayReport,
    decay_rate_check,
    derivative_sup_distance,
    evolve,
    moment_propagation_check,
    refined_decay_constant,
    small_time_check,
    sup_decay_constant,
)
from .mc_oracle import (
    SampleSet,
    load_samples_csv,
    mc_moment,
    sample_gaussian,
    sample_isotropic_cauchy,
    sample_linnik_1d,
    sample_stable_1d,
    save_samples_csv,
)
from .metrics import (
    GridSpec,
    MembershipReport,
    MetricResult,
    composite_metric,
    derivative_seminorm,
    difference_holder_sup,
    difference_seminorm,
    holder_distance,
    holder_seminorm,
    integral_distance,
    membership,
    sup_distance,
)
from .moment_engine import (
    MomentResult,
    absolute_moment,
    even_order_moment,
    fulldim_difference_integral,
    radial_difference_integral,
    select_difference_order,
)
from .quadrature import QuadratureSpec
from .specfun import (
    cosine_difference_integral,
    difference_integral_constant,
    gamma,
    mean_value_theta,
    moment_constant,
    power_difference_sum,
    sin_squared_mellin,
    sphere_area,
)

__version__ = "0.1.0"
