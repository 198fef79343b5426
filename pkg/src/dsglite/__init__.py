"""Budgeted compression of layered scene graphs with bounded shortest-path
stretch between terminal locations."""

from .analysis import (BoundReport, BoundsProfile, achieved_distortion,
                       bounds_profile, bud_bound, compression_stats,
                       nominal_mission_time)
from .compress import (CompressionResult, HierarchicalSpanner, bud_lite,
                       hierarchical_spanner, tod_lite)
from .exact import (ExactModel, ExactSolution, brute_force_oracle,
                    build_ilp_model, solve_exact)
from .graph import (ATOL, NodeId, PathRecord, SceneGraph, SchemaError,
                    TerminalQuery, UnreachablePairError, ancestor,
                    assign_weights, children, diameter, interlayer_weight,
                    lowest_common_ancestor, parent, path_max_weight,
                    shortest_path)
from .graphio import (load_graph, load_query, save_graph, save_query)
from .spanner import (SpannerParams, SpannerResult, StretchReport,
                      build_spanner, d_light_init, greedy_multiplicative,
                      sample_cross_layer, verify_stretch)
from .synthgen import (GridWorldSpec, gen_budlite_toy, gen_fig3_toy,
                       gen_grid_world, gen_todlite_toy)

__version__ = "0.1.0"

__all__ = [
    "ATOL", "BoundReport", "BoundsProfile", "CompressionResult",
    "ExactModel", "ExactSolution", "GridWorldSpec", "HierarchicalSpanner",
    "NodeId", "PathRecord", "SceneGraph", "SchemaError", "SpannerParams",
    "SpannerResult", "StretchReport", "TerminalQuery",
    "UnreachablePairError", "achieved_distortion", "ancestor",
    "assign_weights", "bounds_profile", "brute_force_oracle", "bud_bound",
    "bud_lite", "build_ilp_model", "build_spanner", "children",
    "compression_stats", "d_light_init", "diameter", "gen_budlite_toy",
    "gen_fig3_toy", "gen_grid_world", "gen_todlite_toy",
    "greedy_multiplicative", "hierarchical_spanner", "interlayer_weight",
    "load_graph", "load_query", "lowest_common_ancestor",
    "nominal_mission_time", "parent", "path_max_weight",
    "sample_cross_layer", "save_graph", "save_query", "shortest_path",
    "solve_exact", "tod_lite", "verify_stretch",
]
