"""Exact distributions on the energy walk: like counts and lifetimes.

Two independent computation paths are provided for the like-count law. The
fast path is a dynamic program over (step, energy, likes accrued); the
verification path exhaustively enumerates increment sequences and is guarded
to small horizons. Both treat energy zero as absorbing: a dead agent accrues
nothing further, matching the simulator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams, step_distribution

__all__ = [
    "ENUM_MAX_STEPS",
    "LikeCountPmf",
    "LifetimePmf",
    "like_count_pmf_dp",
    "like_count_pmf_enum",
    "lifetime_pmf_dp",
]

# 4^T increment sequences; enumeration refuses anything past this horizon.
ENUM_MAX_STEPS = 14

_PMF_TOL = 1e-9

# Default-kernel increments; a step is a "like step" iff its increment keeps
# or raises the energy by an even amount (0 or +2).
_DELTAS = (2, 1, 0, -1)
_LIKE_FLAGS = (1, 0, 1, 0)


@dataclass(frozen=True)
class LikeCountPmf:
    """P{agent collects exactly n likes} for n = 0..max_steps."""

    params: ModelParams
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "probabilities", probs)
        if probs.ndim != 1 or len(probs) != self.params.max_steps + 1:
            raise ValueError("pmf must have one entry per count 0..max_steps")
        if np.any(probs < -_PMF_TOL) or abs(probs.sum() - 1.0) > _PMF_TOL:
            raise ValueError("pmf entries must be a probability vector")

    def __len__(self) -> int:
        return len(self.probabilities)


@dataclass(frozen=True)
class LifetimePmf:
    """P{first visit to energy 0 happens at step t}, plus survival mass.

    ``by_step[t]`` is the absorption probability at step t (entry 0 is 0);
    ``survival`` is the probability of outliving the step budget.
    """

    params: ModelParams
    by_step: np.ndarray
    survival: float

    def __post_init__(self) -> None:
        probs = np.asarray(self.by_step, dtype=float)
        object.__setattr__(self, "by_step", probs)
        if abs(probs.sum() + self.survival - 1.0) > _PMF_TOL:
            raise ValueError("absorption probabilities plus survival must be 1")


def _require_default_kernel(params: ModelParams, what: str) -> None:
    if params.extended_reactions:
        raise ValueError(f"{what} is defined for the default 4-outcome kernel only")


def _delta_prob_table(params: ModelParams, max_energy: int) -> np.ndarray:
    """table[E] = probabilities of increments (2, 1, 0, -1) at energy E."""
    table = np.zeros((max_energy + 1, len(_DELTAS)))
    for energy in range(1, max_energy + 1):
        dist = step_distribution(params, energy)
        table[energy] = [dist.probability(d) for d in _DELTAS]
    return table


def like_count_pmf_dp(params: ModelParams) -> LikeCountPmf:
    """Exact like-count law by dynamic programming.

    The state is (energy, likes so far); one forward sweep per step moves
    mass along the four increments, bumping the like count on 0/+2 steps.
    Mass that reaches energy 0 is parked in an absorbed row and keeps its
    like count. Reachable energy is bounded by E0 + 2 * max_steps, so the
    lattice is a dense array; cost is O(max_steps^2 * E_reach).
    """
    _require_default_kernel(params, "like_count_pmf_dp")
    horizon = params.max_steps
    e0 = params.initial_energy
    e_max = e0 + 2 * horizon
    table = _delta_prob_table(params, e_max)

    # mass[E, n]; row 0 holds absorbed paths.
    mass = np.zeros((e_max + 3, horizon + 1))
    mass[e0, 0] = 1.0
    for _ in range(horizon):
        moved = np.zeros_like(mass)
        moved[0] = mass[0]
        live = mass[1 : e_max + 1]
        for idx, delta in enumerate(_DELTAS):
            weighted = live * table[1 : e_max + 1, idx : idx + 1]
            inc = _LIKE_FLAGS[idx]
            moved[1 + delta : e_max + 1 + delta, inc : horizon + 1] += weighted[
                :, 0 : horizon + 1 - inc
            ]
        mass = moved
    return LikeCountPmf(params, mass.sum(axis=0))


def like_count_pmf_enum(params: ModelParams, block_limit: int = 1 << 18) -> LikeCountPmf:
    """Exact like-count law by exhaustive path enumeration.

    Walks every increment sequence outcome-by-outcome, truncating a path the
    moment it hits energy 0 and banking its probability (the product of its
    per-step increment probabilities) into the like-count bucket. Ground
    truth for the dynamic program; cost grows as 4^max_steps, hence the
    ``ENUM_MAX_STEPS`` guard. Blocks of paths larger than ``block_limit``
    are split so memory stays bounded.
    """
    _require_default_kernel(params, "like_count_pmf_enum")
    if params.max_steps > ENUM_MAX_STEPS:
        raise ValueError(
            f"enumeration is guarded to max_steps <= {ENUM_MAX_STEPS}; "
            "use like_count_pmf_dp for longer horizons"
        )
    block_limit = max(int(block_limit), 4)
    horizon = params.max_steps
    e0 = params.initial_energy
    table = _delta_prob_table(params, e0 + 2 * horizon)
    deltas = np.asarray(_DELTAS)
    like_inc = np.asarray(_LIKE_FLAGS)

    bucket = np.zeros(horizon + 1)
    stack = [
        (
            0,
            np.asarray([e0], dtype=np.int64),
            np.asarray([0], dtype=np.int64),
            np.asarray([1.0]),
        )
    ]
    while stack:
        t, energy, likes, prob = stack.pop()
        if t == horizon:
            bucket += np.bincount(likes, weights=prob, minlength=horizon + 1)
            continue
        if 4 * len(energy) > block_limit and len(energy) > 1:
            half = len(energy) // 2
            stack.append((t, energy[:half], likes[:half], prob[:half]))
            stack.append((t, energy[half:], likes[half:], prob[half:]))
            continue
        next_energy = (energy[None, :] + deltas[:, None]).ravel()
        next_likes = (likes[None, :] + like_inc[:, None]).ravel()
        next_prob = (table[energy].T * prob[None, :]).ravel()
        feasible = next_prob > 0.0
        dead = feasible & (next_energy == 0)
        alive = feasible & (next_energy > 0)
        if dead.any():
            bucket += np.bincount(
                next_likes[dead], weights=next_prob[dead], minlength=horizon + 1
            )
        if alive.any():
            stack.append((t + 1, next_energy[alive], next_likes[alive], next_prob[alive]))
    return LikeCountPmf(params, bucket)


def lifetime_pmf_dp(params: ModelParams) -> LifetimePmf:
    """First-passage law of the walk to energy 0, on the same lattice."""
    _require_default_kernel(params, "lifetime_pmf_dp")
    horizon = params.max_steps
    e0 = params.initial_energy
    e_max = e0 + 2 * horizon
    table = _delta_prob_table(params, e_max)

    live = np.zeros(e_max + 3)
    live[e0] = 1.0
    absorbed_at = np.zeros(horizon + 1)
    for t in range(1, horizon + 1):
        moved = np.zeros_like(live)
        for idx, delta in enumerate(_DELTAS):
            moved[1 + delta : e_max + 1 + delta] += (
                live[1 : e_max + 1] * table[1 : e_max + 1, idx]
            )
        absorbed_at[t] = moved[0]
        moved[0] = 0.0
        live = moved
    return LifetimePmf(params, absorbed_at, float(live.sum()))
