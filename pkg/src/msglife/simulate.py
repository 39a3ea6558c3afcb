"""Monte-Carlo simulation of single agents and whole information flows.

Reproducibility contract: every agent consumes uniforms from its own RNG
stream, derived from (root seed, agent index) via ``numpy``'s SeedSequence
spawn keys. Per step the stream yields uniforms in a fixed order -- (like,
repost) for the default kernel, (like, dislike, repost, reference) in
extended mode -- so trajectories are bit-identical however agents are
scheduled.
"""

from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .histogram import Histogram
from .model import ModelParams, _event_probs

__all__ = [
    "Step",
    "Trajectory",
    "AgentOutcome",
    "BirthRecord",
    "FlowResult",
    "agent_stream",
    "simulate_agent",
    "simulate_ensemble",
    "simulate_flow",
    "collect_histogram",
    "write_outcomes_csv",
    "read_outcomes_csv",
]

HISTOGRAM_METRICS = ("likes", "reposts", "lifetime")

# Reaction draws consumed per step, by kernel.
_DRAWS_DEFAULT = 2
_DRAWS_EXTENDED = 4

# Uniforms are drawn from the agent stream in blocks of this many steps.
_STEP_BLOCK = 128


class Step(NamedTuple):
    t: int
    delta: int
    energy_after: int


@dataclass(frozen=True, slots=True)
class Trajectory:
    """One agent's energy path: starts at the initial energy, ends at the
    first visit to zero or at the step budget, whichever comes first."""

    initial_energy: int
    steps: tuple[Step, ...]
    absorbed: bool


@dataclass(frozen=True, slots=True)
class AgentOutcome:
    """Per-agent life-cycle summary."""

    likes: int
    dislikes: int
    reposts: int
    references: int
    lifetime: int
    final_energy: int

    @property
    def censored(self) -> bool:
        """Still alive when observation stopped."""
        return self.final_energy > 0


@dataclass(frozen=True, slots=True)
class BirthRecord:
    agent_id: int
    step: int
    parent_id: int | None  # None marks a spontaneous appearance


@dataclass(frozen=True)
class FlowResult:
    """All agents of one simulated information flow, indexed by agent id."""

    outcomes: tuple[AgentOutcome, ...]
    births: tuple[BirthRecord, ...]

    @property
    def total_agents(self) -> int:
        return len(self.outcomes)


def agent_stream(root_seed, agent_index: int) -> np.random.Generator:
    """Independent generator for one agent, a pure function of its inputs."""
    seq = np.random.SeedSequence(entropy=root_seed, spawn_key=(agent_index,))
    return np.random.Generator(np.random.PCG64(seq))


def _spontaneous_stream(root_seed) -> np.random.Generator:
    # Length-2 spawn key cannot collide with the agents' length-1 keys.
    seq = np.random.SeedSequence(entropy=root_seed, spawn_key=(0, 0))
    return np.random.Generator(np.random.PCG64(seq))


def _walk(
    params: ModelParams,
    rng: np.random.Generator,
    max_steps: int,
    prob_cache: dict,
    record_steps: bool,
    repost_times: list | None = None,
):
    """Run one agent for at most ``max_steps`` steps.

    Returns (steps, likes, dislikes, reposts, references, lifetime,
    final_energy); ``steps`` is None unless ``record_steps``.
    """
    extended = params.extended_reactions
    draws = _DRAWS_EXTENDED if extended else _DRAWS_DEFAULT
    energy = params.initial_energy
    likes = dislikes = reposts = references = 0
    steps: list[Step] | None = [] if record_steps else None

    buf = rng.random(draws * min(max_steps, _STEP_BLOCK))
    pos = 0
    drawn = len(buf) // draws

    t = 0
    while t < max_steps and energy > 0:
        if pos == len(buf):
            block = min(max_steps - drawn, _STEP_BLOCK)
            buf = rng.random(draws * block)
            drawn += block
            pos = 0
        probs = prob_cache.get(energy)
        if probs is None:
            probs = _event_probs(params, energy)
            prob_cache[energy] = probs
        p_like, p_dislike, p_repost, p_reference = probs
        liked = buf[pos] < p_like
        if extended:
            disliked = buf[pos + 1] < p_dislike
            reposted = buf[pos + 2] < p_repost
            referenced = buf[pos + 3] < p_reference
        else:
            disliked = referenced = False
            reposted = buf[pos + 1] < p_repost
        pos += draws
        t += 1

        raw = -1
        if liked:
            raw += 1
            likes += 1
        if reposted:
            raw += 2
            reposts += 1
            if repost_times is not None:
                repost_times.append(t)
        if disliked:
            raw -= 1
            dislikes += 1
        if referenced:
            raw += 1
            references += 1

        new_energy = energy + raw
        if new_energy < 0:
            new_energy = 0  # absorbing boundary clamps the extended -2 step
        if record_steps:
            steps.append(Step(t, new_energy - energy, new_energy))
        energy = new_energy

    return steps, likes, dislikes, reposts, references, t, energy


def simulate_agent(params: ModelParams, seed) -> tuple[Trajectory, AgentOutcome]:
    """Simulate one agent from birth to absorption or the step budget.

    ``seed`` may be an int, a SeedSequence, or a Generator; the result is a
    deterministic function of (params, seed).
    """
    rng = np.random.default_rng(seed)
    steps, likes, dislikes, reposts, references, lifetime, energy = _walk(
        params, rng, params.max_steps, {}, record_steps=True
    )
    trajectory = Trajectory(params.initial_energy, tuple(steps), absorbed=energy == 0)
    outcome = AgentOutcome(likes, dislikes, reposts, references, lifetime, energy)
    return trajectory, outcome


def simulate_ensemble(
    params: ModelParams, n_agents: int, root_seed
) -> list[AgentOutcome]:
    """Simulate ``n_agents`` independent agents on per-index streams.

    Agent i's outcome depends only on (params, root_seed, i), so the ensemble
    could be evaluated in any order or in parallel without changing results.
    """
    if n_agents < 1:
        raise ValueError("n_agents must be >= 1")
    cache: dict = {}
    outcomes = []
    for index in range(n_agents):
        rng = agent_stream(root_seed, index)
        _, likes, dislikes, reposts, references, lifetime, energy = _walk(
            params, rng, params.max_steps, cache, record_steps=False
        )
        outcomes.append(
            AgentOutcome(likes, dislikes, reposts, references, lifetime, energy)
        )
    return outcomes


def simulate_flow(
    params: ModelParams,
    horizon: int,
    seed,
    max_agents: int = 10**6,
) -> FlowResult:
    """Simulate a whole information flow over ``horizon`` global steps.

    One agent exists at step 0. At each later step a fresh agent appears with
    the spontaneous probability, and every repost event of a living agent
    spawns a copy (starting from the initial energy) on the following step.
    Agents created once ``max_agents`` is reached are dropped.

    Births at the same step are ordered spontaneous-first, then by parent id;
    agent ids count up in birth order.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if max_agents < 1:
        raise ValueError("max_agents must be >= 1")

    spont = _spontaneous_stream(seed)
    draws = spont.random(horizon)
    # heap entries: (birth step, 0 spontaneous / 1 repost copy, parent id)
    pending: list[tuple[int, int, int]] = [(0, 0, -1)]
    for t in range(1, horizon + 1):
        if draws[t - 1] < params.spontaneous_prob:
            heapq.heappush(pending, (t, 0, -1))

    cache: dict = {}
    outcomes: list[AgentOutcome] = []
    births: list[BirthRecord] = []
    next_id = 0
    while pending and next_id < max_agents:
        birth_step, _, parent = heapq.heappop(pending)
        agent_id = next_id
        next_id += 1
        births.append(
            BirthRecord(agent_id, birth_step, None if parent < 0 else parent)
        )
        rng = agent_stream(seed, agent_id)
        budget = min(params.max_steps, horizon - birth_step)
        repost_times: list[int] = []
        _, likes, dislikes, reposts, references, lifetime, energy = _walk(
            params, rng, budget, cache, record_steps=False, repost_times=repost_times
        )
        outcomes.append(
            AgentOutcome(likes, dislikes, reposts, references, lifetime, energy)
        )
        for local_t in repost_times:
            child_birth = birth_step + local_t + 1
            if child_birth <= horizon:
                heapq.heappush(pending, (child_birth, 1, agent_id))

    return FlowResult(tuple(outcomes), tuple(births))


def collect_histogram(outcomes: Sequence[AgentOutcome], metric: str) -> Histogram:
    """Unit-width integer histogram of one outcome metric, bins 0..max."""
    if not outcomes:
        raise ValueError("cannot build a histogram from no outcomes")
    if metric not in HISTOGRAM_METRICS:
        raise ValueError(f"metric must be one of {HISTOGRAM_METRICS}, got {metric!r}")
    values = np.fromiter(
        (getattr(o, metric) for o in outcomes), dtype=np.int64, count=len(outcomes)
    )
    return Histogram.from_values(values)


_OUTCOME_COLUMNS = [
    "agent_id",
    "parent_id",
    "birth_step",
    "likes",
    "dislikes",
    "reposts",
    "references",
    "lifetime",
    "final_energy",
    "censored",
]


def write_outcomes_csv(
    path,
    outcomes: Sequence[AgentOutcome],
    births: Sequence[BirthRecord] | None = None,
) -> None:
    """Write the outcome table; flow runs also carry the birth log columns.

    For plain replicate ensembles parent_id is left empty and birth_step is 0;
    in flow output a missing parent is written as SPONTANEOUS.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_OUTCOME_COLUMNS)
        for agent_id, outcome in enumerate(outcomes):
            if births is not None:
                birth = births[agent_id]
                parent = "SPONTANEOUS" if birth.parent_id is None else birth.parent_id
                birth_step = birth.step
            else:
                parent = ""
                birth_step = 0
            writer.writerow(
                [
                    agent_id,
                    parent,
                    birth_step,
                    outcome.likes,
                    outcome.dislikes,
                    outcome.reposts,
                    outcome.references,
                    outcome.lifetime,
                    outcome.final_energy,
                    "true" if outcome.censored else "false",
                ]
            )


def read_outcomes_csv(path) -> list[AgentOutcome]:
    """Read back the outcome columns of a table written by this module."""
    outcomes = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not set(_OUTCOME_COLUMNS[3:-1]).issubset(
            reader.fieldnames
        ):
            raise ValueError(f"{path}: not an outcome table")
        for row in reader:
            outcomes.append(
                AgentOutcome(
                    likes=int(row["likes"]),
                    dislikes=int(row["dislikes"]),
                    reposts=int(row["reposts"]),
                    references=int(row["references"]),
                    lifetime=int(row["lifetime"]),
                    final_energy=int(row["final_energy"]),
                )
            )
    return outcomes
