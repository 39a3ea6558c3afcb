"""Core stochastic model of a message's energy life cycle.

A message ("agent") carries a nonnegative integer energy. Public reactions
(like, dislike, repost, reference) arrive with probabilities that scale with
the current energy through a monotone response curve, and every reaction
shifts the energy; one unit drains away at each step regardless. Energy zero
is absorbing: a dead message draws no further reactions.

Everything here is immutable and side-effect free, so instances can be shared
freely across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

__all__ = [
    "NORMALIZATION_TOL",
    "ResponseCurve",
    "ModelParams",
    "StepDistribution",
    "TransitionKernel",
    "reaction_probs",
    "step_distribution",
    "transition_prob",
]

# Probabilities are products of machine reals; distributions must renormalize
# to 1 within this tolerance.
NORMALIZATION_TOL = 1e-12

_VARIANTS = ("saturating", "linear_capped", "constant")


@dataclass(frozen=True)
class ResponseCurve:
    """Monotone nondecreasing map from energy to a response factor in [0, 1].

    Variants:
      * ``saturating``:    E / (E + c), half response at E = c
      * ``linear_capped``: min(1, E / c), full response from E = c onward
      * ``constant``:      a, independent of energy
    """

    variant: str
    c: float | None = None
    a: float | None = None

    def __post_init__(self) -> None:
        if self.variant not in _VARIANTS:
            raise ValueError(
                f"unknown response curve variant {self.variant!r}; "
                f"expected one of {_VARIANTS}"
            )
        if self.variant in ("saturating", "linear_capped"):
            if self.c is None or not self.c > 0:
                raise ValueError("response curve constant c must be > 0")
        else:
            if self.a is None or not 0.0 <= self.a <= 1.0:
                raise ValueError("constant response level a must lie in [0, 1]")

    @classmethod
    def saturating(cls, c: float) -> "ResponseCurve":
        return cls("saturating", c=float(c))

    @classmethod
    def linear_capped(cls, c: float) -> "ResponseCurve":
        return cls("linear_capped", c=float(c))

    @classmethod
    def constant(cls, a: float) -> "ResponseCurve":
        return cls("constant", a=float(a))

    def __call__(self, energy: float) -> float:
        """Evaluate the curve at a nonnegative energy."""
        if energy < 0:
            raise ValueError("energy must be nonnegative")
        if self.variant == "saturating":
            return energy / (energy + self.c)
        if self.variant == "linear_capped":
            return min(1.0, energy / self.c)
        return self.a


@dataclass(frozen=True)
class ModelParams:
    """All scalar parameters of the model plus the response curve.

    ``base_dislike_prob`` is carried but unused unless ``extended_reactions``
    is on; the default kernel folds only likes and reposts into the energy
    step. In extended mode ``base_reference_prob`` defaults to the like base
    when left unset.
    """

    base_like_prob: float
    base_repost_prob: float
    initial_energy: int
    max_steps: int
    base_dislike_prob: float = 0.0
    spontaneous_prob: float = 0.0
    response: ResponseCurve | None = None
    extended_reactions: bool = False
    base_reference_prob: float | None = None

    def __post_init__(self) -> None:
        for name in (
            "base_like_prob",
            "base_repost_prob",
            "base_dislike_prob",
            "spontaneous_prob",
        ):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.base_reference_prob is not None and not (
            0.0 <= self.base_reference_prob <= 1.0
        ):
            raise ValueError("base_reference_prob must lie in [0, 1]")
        if int(self.initial_energy) != self.initial_energy or self.initial_energy < 1:
            raise ValueError("initial_energy must be an integer >= 1")
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise ValueError("max_steps must be an integer >= 1")
        if self.response is None:
            # A fresh message should react at roughly half its base rates.
            object.__setattr__(
                self, "response", ResponseCurve.saturating(float(self.initial_energy))
            )

    @property
    def reference_base(self) -> float:
        if self.base_reference_prob is not None:
            return self.base_reference_prob
        return self.base_like_prob


@dataclass(frozen=True)
class StepDistribution:
    """Conditional law of the per-step energy increment at a given energy.

    ``outcomes`` is an ordered tuple of (delta, probability) pairs with
    distinct deltas; probabilities are nonnegative and sum to one within
    ``NORMALIZATION_TOL``.
    """

    outcomes: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        deltas = [d for d, _ in self.outcomes]
        if len(set(deltas)) != len(deltas):
            raise ValueError("step distribution deltas must be distinct")
        total = 0.0
        for delta, prob in self.outcomes:
            if prob < 0.0:
                raise ValueError(f"negative probability {prob} for delta {delta}")
            total += prob
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"step distribution sums to {total!r}, not 1")

    @property
    def deltas(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.outcomes)

    def probability(self, delta: int) -> float:
        for d, prob in self.outcomes:
            if d == delta:
                return prob
        return 0.0

    def mean(self) -> float:
        return sum(d * p for d, p in self.outcomes)


def reaction_probs(params: ModelParams, energy: int) -> tuple[float, float, float]:
    """Like/dislike/repost probabilities at the given energy.

    Each base rate is scaled by the response curve, so no component ever
    exceeds its base parameter.
    """
    if energy < 0:
        raise ValueError("energy must be nonnegative")
    factor = params.response(energy)
    return (
        params.base_like_prob * factor,
        params.base_dislike_prob * factor,
        params.base_repost_prob * factor,
    )


def _event_probs(params: ModelParams, energy: int) -> tuple[float, float, float, float]:
    """(like, dislike, repost, reference) occurrence probabilities at energy."""
    like, dislike, repost = reaction_probs(params, energy)
    reference = params.reference_base * params.response(energy)
    return like, dislike, repost, reference


def step_distribution(params: ModelParams, energy: int) -> StepDistribution:
    """Distribution of the energy increment from a living state.

    Default kernel: the step is determined by the independent (like, repost)
    pair, giving exactly four outcomes
    +2 (like and repost), +1 (repost only), 0 (like only), -1 (neither).

    Extended kernel: like +1, dislike -1, repost +2, reference +1 as four
    independent events on top of the per-step decay of -1, support
    {-2, ..., +3}; increments that would push the energy below zero are
    clamped at the absorbing boundary (so at energy 1 the -2 outcome folds
    into -1).
    """
    if energy < 1:
        raise ValueError("state 0 is absorbing and has no step distribution")
    if not params.extended_reactions:
        like, _, repost = reaction_probs(params, energy)
        return StepDistribution(
            (
                (2, like * repost),
                (1, (1.0 - like) * repost),
                (0, like * (1.0 - repost)),
                (-1, (1.0 - like) * (1.0 - repost)),
            )
        )
    like, dislike, repost, reference = _event_probs(params, energy)
    accum: dict[int, float] = {}
    for liked, disliked, reposted, referenced in product((0, 1), repeat=4):
        prob = (
            (like if liked else 1.0 - like)
            * (dislike if disliked else 1.0 - dislike)
            * (repost if reposted else 1.0 - repost)
            * (reference if referenced else 1.0 - reference)
        )
        raw = liked - disliked + 2 * reposted + referenced - 1
        delta = max(raw, -energy)
        accum[delta] = accum.get(delta, 0.0) + prob
    ordered = tuple(sorted(accum.items(), key=lambda item: -item[0]))
    return StepDistribution(ordered)


def transition_prob(params: ModelParams, i: int, j: int) -> float:
    """One-step transition probability of the energy walk from state i to j.

    State 0 is absorbing: row 0 puts all its mass on 0. Rows i > 0 agree with
    ``step_distribution`` at energy i and vanish outside its support.
    """
    if i < 0 or j < 0:
        raise ValueError("states must be nonnegative")
    if i == 0:
        return 1.0 if j == 0 else 0.0
    return step_distribution(params, i).probability(j - i)


@dataclass(frozen=True)
class TransitionKernel:
    """Function-like view of the transition matrix over {0, 1, 2, ...}.

    The state space is unbounded above, so the kernel is never materialized
    as a dense matrix.
    """

    params: ModelParams

    def __call__(self, i: int, j: int) -> float:
        return transition_prob(self.params, i, j)

    def row(self, i: int) -> dict[int, float]:
        """Nonzero entries of row i as a {target: probability} mapping."""
        if i < 0:
            raise ValueError("states must be nonnegative")
        if i == 0:
            return {0: 1.0}
        dist = step_distribution(self.params, i)
        return {i + delta: prob for delta, prob in dist.outcomes if prob > 0.0}
