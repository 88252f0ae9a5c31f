"""Coevolutionary simulation toolkit.

Four seeded, reproducible models of adaptation on interdependent landscapes:

* :mod:`coevo.nk` — tunably rugged binary fitness landscapes, adaptive
  walks, exhaustive local-optima enumeration, and coupled multi-species
  coevolution to mutually stable states.
* :mod:`coevo.market` — an agent-based market where consumer groups and
  innovating suppliers coevolve through a mid-run technology shock.
* :mod:`coevo.metaga` — a genetic algorithm whose mutation, crossover and
  inversion rates live on the chromosome and evolve with it.
* :mod:`coevo.engine` / :mod:`coevo.reports` — seeded batch execution with
  CSV, text and figure reports, also available as the ``coevo`` CLI.
"""

from .config import (
    CoevolveSettings,
    ExperimentConfig,
    KINDS,
    MarketSettings,
    MetaGASettings,
    OptimaSettings,
    WalkSettings,
    default_config,
    load_config,
    parse_config,
)
from .engine import RunLog, run_batch, run_replicate
from .errors import (
    CapacityError,
    ConfigError,
    DegeneratePopulationError,
    ParameterError,
    ReportError,
    SelectionError,
    StateError,
)
from .market import (
    MarketParams,
    MarketState,
    PeriodRecord,
    ShockConfig,
    Supplier,
    UserGroup,
    apply_shock,
    classify_outcome,
    init_state,
    run_market,
    step_period,
)
from .metaga import (
    GAConfig,
    MetaChromosome,
    MetaGAResult,
    RateCoding,
    run_meta_ga,
)
from .nk import (
    NKCSystem,
    NKLandscape,
    Walk,
    adaptive_walk,
    build_landscape,
    build_nkc,
    coevolution_run,
    enumerate_local_optima,
    nash_check,
    one_mutant_neighbors,
)
from .reports import write_reports

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # landscapes
    "NKLandscape",
    "NKCSystem",
    "Walk",
    "build_landscape",
    "build_nkc",
    "adaptive_walk",
    "enumerate_local_optima",
    "one_mutant_neighbors",
    "coevolution_run",
    "nash_check",
    # market
    "MarketParams",
    "MarketState",
    "PeriodRecord",
    "ShockConfig",
    "Supplier",
    "UserGroup",
    "init_state",
    "step_period",
    "apply_shock",
    "run_market",
    "classify_outcome",
    # self-adaptive GA
    "GAConfig",
    "MetaChromosome",
    "MetaGAResult",
    "RateCoding",
    "run_meta_ga",
    # engine, config, reports
    "KINDS",
    "ExperimentConfig",
    "WalkSettings",
    "OptimaSettings",
    "CoevolveSettings",
    "MarketSettings",
    "MetaGASettings",
    "load_config",
    "parse_config",
    "default_config",
    "RunLog",
    "run_batch",
    "run_replicate",
    "write_reports",
    # errors
    "ParameterError",
    "CapacityError",
    "ConfigError",
    "StateError",
    "SelectionError",
    "DegeneratePopulationError",
    "ReportError",
]
