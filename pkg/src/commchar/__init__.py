"""Community characterization in dynamic attributed networks.

Detect communities on the aggregated network, describe every node by a
sequence of discretized topological and attribute descriptors, mine closed
sequential patterns tagged with the node's community, and keep the patterns
that best separate each community from the rest.
"""

__version__ = "0.1.0"

from .characterize import CommunityReport, RankedPattern, characterize, growth_rate
from .community import CommunityStructure, louvain, modularity
from .config import PipelineConfig, resolve
from .measures import MeasureTable, compute_table
from .miner import MinedPattern, MiningLimitExceeded, mine_closed
from .network import DynamicNetwork, GlobalWeightedNetwork, aggregate, load_network
from .sequences import DescriptorSpec, Item, SequenceDatabase, build_database, support

__all__ = [
    "CommunityReport", "CommunityStructure", "DescriptorSpec", "DynamicNetwork",
    "GlobalWeightedNetwork", "Item", "MeasureTable", "MinedPattern", "MiningLimitExceeded",
    "PipelineConfig", "RankedPattern", "SequenceDatabase", "aggregate", "build_database",
    "characterize", "compute_table", "growth_rate", "load_network", "louvain",
    "mine_closed", "modularity", "resolve", "support",
]
