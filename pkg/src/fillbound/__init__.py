"""Homological fillings of integer 1-cycles in weighted simplicial
complexes: exact integer-homology solvers, ball coverings and nerves,
distortion-certified chart geometry, the bubble-tree filling pipeline with
its explicit mass bounds, and a synthetic corpus of test geometries."""

from .bounds import BoundParams, BoundTable, bound_calculator, neck_distortion_constant
from .charts import (ChartPolyline, HarmonicChart, ball_diameter_check,
                     chart_length, cone_fill, validate_chart)
from .complexes import (Chain, WeightedComplex, boundary, induced_subcomplex,
                        is_cycle, mass, transfer_chain)
from .covering import (Covering, GeodesicGraph, GraphChain, Nerve,
                       SkeletonMetric, build_covering, build_nerve,
                       graph_cycle_to_nerve, natural_map,
                       nerve_filling_to_triangles, shortest_path)
from .corpus import (ACCEPTANCE_SUITE, CorpusInstance, GENERATORS,
                     build_instance, gen_circle, gen_eh_thin_neck,
                     gen_flat_ball, gen_lens_neck, gen_perturbed_ball,
                     gen_simplex_shell, gen_two_scale_bubble)
from .homology import (FillingResult, H1Structure, InfeasibleError,
                       ResourceCapError, bounded_filling,
                       brute_force_filling, fills_exist, hf1_estimate,
                       homology_rank_and_torsion, minimal_mass_filling,
                       nr_coefficient_bound, nr_coefficient_bound_exact,
                       random_simple_cycle, shortest_h1_basis, some_filling)
from .pipeline import (BodyFillable, FillingReport, NeckRepresentative,
                       classify_fill_branch, decompose_cycle,
                       fill_in_subtree, fill_via_neck, full_fill,
                       neck_thickness_and_diameter, push_to_graph)
from .serialize import load_instance, save_instance
from .tree import BubbleTree, Region, trivial_tree

__version__ = "0.1.0"
