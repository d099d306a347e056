"""Harmonic analysis on the p-biased discrete cube.

Exact biased Fourier-Walsh transforms, influences and noise stability for
functions tabulated on {0,1}^n, Monte Carlo estimators for larger n, and
evaluators and checkers for the level-weight, noise-stability and decoupled
bounds.
"""
__version__ = "0.1.0"

from .cube import (  # noqa: E402
    DEFAULT_CAP,
    BiasedMeasure,
    CapacityError,
    CubeFunction,
    CubePoint,
    IncompatibleOperandsError,
    expectation,
    fix_coordinate,
    flip,
    inner_product,
    norm2,
    point_weight,
    variance,
)
from .fourier import (  # noqa: E402
    Spectrum,
    cross_level_inner,
    fourier_degree,
    inverse_transform,
    level_weight,
    naive_transform,
    subset_mask,
    transform,
    walsh_function,
    walsh_value,
)
from .influence import (  # noqa: E402
    InfluenceProfile,
    NoiseParams,
    apply_noise_operator,
    influence,
    influence_profile,
    influences,
    noise_stability_exact,
)
from .montecarlo import Estimate, Oracle, influence_mc, noise_sample, noise_stability_mc  # noqa: E402
from .bounds import (  # noqa: E402
    BoundResult,
    alpha,
    decoupled_bound,
    hypercontractivity_constant,
    integral_bound_check,
    level_weight_bound,
    stability_bound,
    tail_bound,
)
from .families import (  # noqa: E402
    TribesSpec,
    and_function,
    dictator,
    majority,
    make_tribes,
    or_function,
    parity,
    random_boolean,
    random_low_influence,
    tribes,
    tribes_influence_closed_form,
    tribes_level_coefficient,
    tribes_size_suggestion,
)
from .reports import VerificationReport  # noqa: E402
from .diagnostics import (  # noqa: E402
    Partition,
    check_decoupled_exceedance,
    check_decoupled_theorem,
    check_exceedance_lemma,
    check_level_weight_lemma,
    check_stability_theorem,
    exceedance_set,
    partition_level_sum,
    partition_rhs,
    random_partition,
)
