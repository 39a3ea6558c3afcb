"""msglife: discrete-time simulator and analysis toolkit for message life cycles.

Messages behave as agents with an energy that public reactions replenish and
time drains; the package simulates their trajectories and whole reaction
flows, computes exact like-count and lifetime distributions, fits Weibull
densities to count histograms, and ingests snapshot timelines from files.
"""

from .model import (
    ModelParams,
    ResponseCurve,
    StepDistribution,
    TransitionKernel,
    reaction_probs,
    step_distribution,
    transition_prob,
)
from .simulate import (
    AgentOutcome,
    BirthRecord,
    FlowResult,
    Trajectory,
    agent_stream,
    collect_histogram,
    simulate_agent,
    simulate_ensemble,
    simulate_flow,
)
from .exact import (
    LifetimePmf,
    LikeCountPmf,
    like_count_pmf_dp,
    like_count_pmf_enum,
    lifetime_pmf_dp,
)
from .histogram import Histogram, cdf_sup_distance, total_variation
from .weibull import (
    FitReport,
    WeibullParams,
    fit_least_squares,
    fit_mle,
    ks_statistic,
    sample_weibull,
    weibull_cdf,
    weibull_pdf,
)
from .ingest import (
    IncrementSeries,
    StoredResult,
    TimelineError,
    TimelineRecord,
    compute_increments,
    fit_message,
    load_timeline,
    load_timeline_lenient,
    store_results,
)

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "ResponseCurve",
    "StepDistribution",
    "TransitionKernel",
    "reaction_probs",
    "step_distribution",
    "transition_prob",
    "AgentOutcome",
    "BirthRecord",
    "FlowResult",
    "Trajectory",
    "agent_stream",
    "collect_histogram",
    "simulate_agent",
    "simulate_ensemble",
    "simulate_flow",
    "LifetimePmf",
    "LikeCountPmf",
    "like_count_pmf_dp",
    "like_count_pmf_enum",
    "lifetime_pmf_dp",
    "Histogram",
    "cdf_sup_distance",
    "total_variation",
    "FitReport",
    "WeibullParams",
    "fit_least_squares",
    "fit_mle",
    "ks_statistic",
    "sample_weibull",
    "weibull_cdf",
    "weibull_pdf",
    "IncrementSeries",
    "StoredResult",
    "TimelineError",
    "TimelineRecord",
    "compute_increments",
    "fit_message",
    "load_timeline",
    "load_timeline_lenient",
    "store_results",
    "__version__",
]
