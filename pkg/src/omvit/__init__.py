"""Community-aware node influence: (overlapping) modularity vitality and SIR evaluation."""

from .community import (
    SLPA,
    Cover,
    CoverStats,
    Partition,
    belonging_coefficients,
    collapse_to_partition,
    cover_stats,
    load_cover,
    load_partition,
    save_cover,
    save_partition,
    slpa_detect,
)
from .exceptions import OmvitError
from .graph import (
    Graph,
    TopologyStats,
    degree,
    degree_scores,
    largest_connected_component,
    load_edge_list,
    topology_stats,
)
from .modularity import (
    CommunityTally,
    crisp_tallies,
    fuzzy_tallies,
    newman_modularity,
    overlapping_modularity,
)
from .ranking import Ranking, rank, top_fraction
from .scores import ScoreVector
from .sir import (
    SIREvaluator,
    SirOutcome,
    SirParams,
    SweepResult,
    epidemic_threshold,
    relative_outbreak_difference,
    sir_mean,
    sir_run,
    sweep,
)
from .vitality import (
    ModularityVitality,
    OverlappingModularityVitality,
    modularity_vitality,
    overlapping_modularity_vitality,
    vitality_by_recompute,
)

__version__ = "0.1.0"

__all__ = [
    "SLPA",
    "CommunityTally",
    "Cover",
    "CoverStats",
    "Graph",
    "ModularityVitality",
    "OmvitError",
    "OverlappingModularityVitality",
    "Partition",
    "Ranking",
    "SIREvaluator",
    "ScoreVector",
    "SirOutcome",
    "SirParams",
    "SweepResult",
    "TopologyStats",
    "belonging_coefficients",
    "collapse_to_partition",
    "cover_stats",
    "crisp_tallies",
    "degree",
    "degree_scores",
    "epidemic_threshold",
    "fuzzy_tallies",
    "largest_connected_component",
    "load_cover",
    "load_edge_list",
    "load_partition",
    "modularity_vitality",
    "newman_modularity",
    "overlapping_modularity",
    "overlapping_modularity_vitality",
    "rank",
    "relative_outbreak_difference",
    "save_cover",
    "save_partition",
    "sir_mean",
    "sir_run",
    "slpa_detect",
    "sweep",
    "top_fraction",
    "topology_stats",
    "vitality_by_recompute",
]
