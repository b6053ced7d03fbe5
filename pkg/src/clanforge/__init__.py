"""Friendship-network analytics for MMORPG player data.

Metrics, power-law fitting, player cohorts, map-equation communities and
community-based clan recommendation over undirected friendship graphs.
"""
from .centrality import ScoreVector, betweenness, pagerank
from .cohorts import CohortAssignment, classify_by_score, classify_groups, correlate_cohort, correlate_scores
from .community import clans_to_partition, detect_communities, map_equation, nmi, optimize_map_equation
from .graph import Graph, PlayerTable, build_graph, load_edge_list, load_metadata, remove_nodes
from .metrics import (average_clustering, average_shortest_path, connected_components, degree_distribution,
                      small_world_report)
from .partition import Partition
from .powerlaw import FitReport, fit_gamma_mle, model_pmf
from .recommender import RecommendConfig, Recommendation, batch_recommend, recommend_clan
from .synth import generate_powerlaw, generate_uniform

__version__ = "0.1.0"
