"""Cloned-profile detection on attribute-augmented social graphs."""

from .detector import (
    CloneDetector,
    DetectionConfig,
    GroundTruthOracle,
    StochasticOracle,
    SuspectReport,
    detect,
)
from .graph import AttributeProfile, GraphError, SocialGraph, load_graph, save_graph, validate
from .mcl import ClusterSet, MclParams, run_mcl
from .similarity import augment, augmented_adjacency, compute_k, name_similarity, profile_similarity
from .strength import strength_of_relationship
from .synthetic import SynthParams, build_fixture20, generate_synthetic
from .weights import edge_weight, weigh_graph

__version__ = "0.1.0"
