"""Community-role and social-capitalist analysis for directed follower networks."""

from ._backend import BACKEND_NAME
from .capitalists import CapitalistRecord, DetectionConfig, detect, overlap_index, ratio
from .clustering import Clustering, davies_bouldin, kmeans, normalize, sweep_k
from .community import LouvainConfig, Partition, directed_modularity, louvain
from .graph import DirectedGraph, ingest_edge_list
from .roles import (
    FeatureMatrix,
    ThresholdRole,
    classify_by_thresholds,
    directed_measures,
    generalized_measures,
    original_measures,
    participation,
    within_module_degree,
)
from .synth import CapitalistPlant, PlantedSpec, RolePlant, generate

__version__ = "0.1.0"
