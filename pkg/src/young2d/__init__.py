"""Two-parameter Young integrals, bivariation bounds and upcrossing local times."""
from .bounds import (BoundReport, ControlModulus, DivergentSeriesError, main_bound,
                     towghi_bound, verify_main_inequality, zeta)
from .functions import (Grid1D, HypothesisError, HypothesisWarning, SampledFunction1D,
                        SampledFunction2D, SizeError, uniform_grid)
from .integral import (IntegralResult, corner_term, rs_sum_1d, step_integral_2d,
                       telescope_delta, young_1d, young_2d, young_bound_1d)
from .localtime import (BrownianPath, EmbeddedWalk, LocalTimeField, UndersamplingError,
                        UpcrossingField, bivariation_moments, convergence_experiment,
                        embed_walk, occupation_local_time, simulate_bm, stop_at_exit,
                        summation_by_parts_check, upcrossing_field)
from .partitions import (RefinementChain, StepFunction1D, StepFunction2D, TaggedPartition,
                         build_chain, make_step_1d, make_step_2d)
from .variation import (HolderReport, VariationResult, bivariation_x, bivariation_y,
                        check_holder_control, joint_variation, p_variation,
                        p_variation_bruteforce)

__version__ = "0.1.0"
