"""Virtual isometries, the rescaled characteristic polynomial ratio and its sine-kernel limit."""
from .argument import (
    arg_supremum,
    chernoff_bound,
    count_zeros_arc,
    im_log_Z,
    index_identity_residual,
    mgf_exact,
    x_n,
)
from .ensemble import EnsembleRun, ExperimentManifest, load_run, run_grow, run_verify, run_xi_grid
from .isometry import (
    Reflection,
    VirtualIsometryChain,
    apply_reflection,
    grow_chain,
    reflection_from_target,
    unitarity_residual,
)
from .powersums import compare_power_sums, power_sum_closed_form, power_sum_direct, r_alpha
from .rng import derive_stream, sample_unit_sphere
from .sine_stats import (
    count_in_interval,
    coupling_error_profile,
    deviation_profile,
    empirical_pair_correlation,
    sine_kernel_determinant,
    variance_profile,
)
from .spectrum import RescaledPointSet, Spectrum, eigenangles, periodized_angle, rescaled_points
from .xi import functional_equation_residual, growth_profile, xi_direct, xi_infinity_approx, xi_product

__version__ = "0.1.0"
