"""Graph representation, generators, the exact oracle and edge-list I/O."""

from .edgelist import (
    dumps_edge_list,
    iter_edge_list,
    loads_edge_list,
    read_edge_list,
    read_weighted,
    read_weights,
    write_edge_list,
    write_weights,
)
from .generators import (
    gen_biregular_bipartite,
    gen_clique,
    gen_gnp,
    gen_petersen,
    gen_regular_bipartite,
    gen_turan_tight,
    gen_weighted_bipartite,
    gen_weighted_complete_bipartite,
    regular_bipartite_edges,
)
from .graph import (
    AnyGraph,
    DegreeProfile,
    Graph,
    GraphError,
    VertexSet,
    WeightedGraph,
    build_graph,
    build_weighted,
    check_graph,
    degree_profile,
    is_independent,
    split_weights,
)
from .oracle import DEFAULT_LIMIT, OracleLimitError, exact_max_is, independence_number

__all__ = [
    "AnyGraph",
    "DEFAULT_LIMIT",
    "DegreeProfile",
    "Graph",
    "GraphError",
    "OracleLimitError",
    "VertexSet",
    "WeightedGraph",
    "build_graph",
    "build_weighted",
    "check_graph",
    "degree_profile",
    "dumps_edge_list",
    "exact_max_is",
    "gen_biregular_bipartite",
    "gen_clique",
    "gen_gnp",
    "gen_petersen",
    "gen_regular_bipartite",
    "gen_turan_tight",
    "gen_weighted_bipartite",
    "gen_weighted_complete_bipartite",
    "independence_number",
    "is_independent",
    "iter_edge_list",
    "loads_edge_list",
    "read_edge_list",
    "read_weighted",
    "read_weights",
    "regular_bipartite_edges",
    "split_weights",
    "write_edge_list",
    "write_weights",
]
