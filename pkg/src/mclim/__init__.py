"""Limits of reinforced non-stationary Markov chains and sojourn-time cycles."""
from .chain_model import (
    ChainModel,
    InvariantError,
    Issue,
    ModelError,
    ParseError,
    StateId,
    TieError,
    ValidationReport,
    load_model,
    parse_model,
    perturb_ties,
    read_model,
    row_max_successor,
    serialize,
    validate,
)
from .limit_cycle import Cycle, GreedyPath, all_limits, extract_cycle, greedy_walk, limit_of, same_limit
from .reinforcement_sim import (
    SimConfig,
    SimResult,
    SimState,
    fixed_point_iterate,
    point_to,
    reinforce,
    run,
    step,
    two_step_closed_form,
)
from .sojourn import (
    NonAlternatingError,
    Partition,
    ReducibleChainError,
    SojournReport,
    StationaryDist,
    cycle_sojourn,
    embedded_stationary,
    monte_carlo_sojourn,
    stationary_sojourn,
)

__version__ = "0.1.0"
