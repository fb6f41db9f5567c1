"""Weighted radial transform calculus for the degenerate diffusion
operator |x|^beta Laplacian, with semigroup kernels, a sharp convolution,
space-time estimates, and a nonlinear mild-solution marcher."""

from .model import (ModelParams, NonlinearitySpec, Triplet, admissible_m,
                    classify_triplet, derive_params, make_nonlinearity)
from .grids import (GridFunction, PHYSICAL, RadialGrid, SPECTRAL,
                    build_adaptive_grid, build_grid, default_grid,
                    from_callable, integrate_weighted, l2_weighted,
                    lp_norm_deta, transform_grids)
from .transform import (TransformPlan, apply_operator_a, hankel_forward,
                        hankel_inverse, kernel_u, kernel_v, plan_transform,
                        spectral_multiply)
from .kernels import (delsarte_D, delsarte_identity_rhs, delsarte_integral,
                      kernel_K, kernel_norm_deta, semigroup_kernel,
                      sharp_convolve, sharp_convolve_direct, watson_lhs,
                      watson_rhs, young_audit)
from .evolution import (BlowupReport, ContractionConstants, EvolutionConfig,
                        Trajectory, blowup_fit, duhamel, existence_time,
                        measure_contraction_constants, picard_iterate_diffs,
                        picard_solve, semigroup_apply, semigroup_apply_kernel)
from .estimates import (NormReport, cm_norm, decay_exponent_fit,
                        duhamel_estimate_audit, smoothing_constant,
                        spacetime_norm)
from .verify import SUITES, run_suites

__version__ = "0.1.0"
