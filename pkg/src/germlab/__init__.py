"""germlab: numerical experiments with set-germs at the origin.

Estimates direction sets and tangent cones from multiscale samples, decides
the sequence selection property at finite horizons, builds extremal Lipschitz
extensions and globalized bi-Lipschitz maps via the doubling process,
computes rescaling pseudo-derivatives, and runs empirical harnesses for the
invariance and transversality results on generated example families.
"""

__version__ = "0.1.0"

from .core import (Cone, DirectionSet, GermOracle, SampledGerm, ScaleSchedule,
                   default_schedule, make_schedule, sample_to_oracle, unit_vector)
from .direction import (DimensionEstimate, cone_over, default_resolutions,
                        dimension_profile, estimate_dimension,
                        estimate_direction_set, greedy_net, map_direction_set,
                        sphere_hausdorff)
from .errors import GermlabError, SchemaError
from .examples import (ZigzagGerm, cone_family, gen_blowup_image, gen_linear_germ,
                       gen_sequence, gen_zigzag, line_family, plane_family,
                       pushforward_germ, ray_family, sector_family,
                       sequence_on_ray_family, union_family, union_germs)
from .expr import EvalDomainError, ParseError, evaluate, parse, to_map, to_source
from .lipschitz import (ExtensionSpec, RescalingReport, doubling_composite,
                        doubling_minus, doubling_plus, estimate_lipschitz,
                        extend_map, pseudo_derivative, rescale, unit_ball_grid,
                        whitney_extend)
from .maps import (MapDescriptor, affine_map, compose_map, eval_map, expr_map,
                   identity_map, linear_map, pwl_map, rotation_map, stack_map,
                   sum_map)
from .sequences import SequenceGerm, SequenceRule, seq_product, seq_sum
from .ssp import (PBResult, SSPVerdict, pb_not_ssp_sequence,
                  polynomial_boundedness_test, ratio_series,
                  ssp_definition_oracle, ssp_distance_test, ssp_ratio_test)
from .transversality import (HarnessConfig, TheoremReport, check_cone_invariance,
                             check_dimension_equality,
                             check_weak_transversality_preservation,
                             cone_dimension, intersect_direction_sets,
                             is_transverse, is_weakly_transverse)

__all__ = [name for name in dir() if not name.startswith("_")]
