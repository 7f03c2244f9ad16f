"""Multi-objective optimization toolkit with an elitist swarm optimizer,
an NSGA-II baseline, a chain routing benchmark, and a seeded experiment
harness."""

from .errors import ConfigurationError, InstanceFormatError
from .etpso import MoEtpso, SwarmMemory, constriction_factor
from .gvrp import (
    GvrpGenome,
    GvrpInstance,
    GvrpProblem,
    generate_instance,
    read_instance,
    write_instance,
)
from .metrics import (
    CampaignResult,
    FrontSnapshot,
    IterationReport,
    NormalizationBounds,
    averaged_cs,
    averaged_hv,
    campaign_bounds,
    convergence_score,
    hypervolume_2d,
    normalize_point,
)
from .nsga2 import HallOfFame, Nsga2
from .pareto import (
    Evaluation,
    RankedEvaluation,
    crowding_distance,
    dominates,
    merit,
    non_dominated_sort,
    rank_cohort,
)
from .problems import Problem, check_problem

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "InstanceFormatError",
    "MoEtpso",
    "SwarmMemory",
    "constriction_factor",
    "GvrpGenome",
    "GvrpInstance",
    "GvrpProblem",
    "generate_instance",
    "read_instance",
    "write_instance",
    "CampaignResult",
    "FrontSnapshot",
    "IterationReport",
    "NormalizationBounds",
    "averaged_cs",
    "averaged_hv",
    "campaign_bounds",
    "convergence_score",
    "hypervolume_2d",
    "normalize_point",
    "HallOfFame",
    "Nsga2",
    "Evaluation",
    "RankedEvaluation",
    "crowding_distance",
    "dominates",
    "merit",
    "non_dominated_sort",
    "rank_cohort",
    "Problem",
    "check_problem",
    "__version__",
]
