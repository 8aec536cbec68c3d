"""
Map equation centrality: node importance from the number of bits saved
when a node is silenced in a modular random-walk code, plus the
community-aware baselines and spreading models used to evaluate it.
"""

from .baselines import (betweenness_centrality, community_based_centrality,
                        community_hub_bridge, degree_centrality,
                        modularity_vitality, pagerank)
from .evalmetrics import (adjusted_mutual_information, kendall_tau_b,
                          rewiring_experiment)
from .flow import (LINK_TELEPORT, NODE_FLOW, NODE_TELEPORT, RAW, WITH_EXIT,
                   FlowField, PartitionFlows, aggregate_partition_flows,
                   compute_flow)
from .graph import Graph, GraphError, parse_edge_list, read_edge_list, rewire
from .mapeq import (codelength, codelength_one_level, map_equation_centrality,
                    mec_all, mec_node, mec_set)
from .partition import Partition, PartitionError, read_partition
from .partitioning import (SearchConfig, effective_num_modules, mixing,
                           modularity, optimize_two_level)
from .ranking import CentralityVector, rank_nodes
from .spreading import (LtConfig, SirConfig, imprecision, linear_threshold,
                        selection_perplexity, sir_spreading_power,
                        spreading_powers)

__version__ = "0.1.0"

__all__ = [
    "Graph", "GraphError", "parse_edge_list", "read_edge_list", "rewire",
    "Partition", "PartitionError", "read_partition",
    "RAW", "NODE_TELEPORT", "LINK_TELEPORT", "WITH_EXIT", "NODE_FLOW",
    "FlowField", "PartitionFlows", "compute_flow", "aggregate_partition_flows",
    "codelength", "codelength_one_level", "map_equation_centrality",
    "mec_all", "mec_node", "mec_set",
    "SearchConfig", "optimize_two_level", "effective_num_modules", "mixing",
    "modularity",
    "degree_centrality", "betweenness_centrality", "pagerank",
    "modularity_vitality", "community_hub_bridge",
    "community_based_centrality",
    "LtConfig", "SirConfig", "linear_threshold", "sir_spreading_power",
    "spreading_powers", "imprecision", "selection_perplexity",
    "CentralityVector", "rank_nodes",
    "adjusted_mutual_information", "kendall_tau_b", "rewiring_experiment",
]
