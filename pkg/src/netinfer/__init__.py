"""Community-preserving network inference from diffusion cascades."""

from .cascades import Cascade, CascadeSet, CascadeVector, parse_cascades, to_cascade_vector
from .graphs import CommunityPartition, GenConfig, Graph, load_graph, load_partition, planted_partition
from .inference import InferredGraph, baseline_time_adjacency, infer, score_cascades
from .simulate import SimConfig, simulate, simulate_batch

__version__ = "0.1.0"

__all__ = [
    "Cascade", "CascadeSet", "CascadeVector", "parse_cascades", "to_cascade_vector",
    "CommunityPartition", "GenConfig", "Graph", "load_graph", "load_partition", "planted_partition",
    "InferredGraph", "baseline_time_adjacency", "infer", "score_cascades",
    "SimConfig", "simulate", "simulate_batch",
]
