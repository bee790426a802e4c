"""Behavior measurement: communicativeness, risk aversion, and the niche grid.

Communicativeness c is the fraction of turns with a hint token available
on which the agent actually hinted. Risk aversion r is the mean grounded
playability of cards at the moment the agent played them. Both pool raw
counts across every game of an evaluation (ratio of sums, not mean of
per-game ratios), and both seats of a self-play evaluation pool into one
accumulator. An individual whose evaluation produced no hint opportunity
or no play has an undefined descriptor and is not nicheable.

The behavior space is the unit square cut into 20 x 20 niches of width
0.05; the last interval is closed above so (1.0, 1.0) lands at (19, 19).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from . import belief
from .engine import HINT_COLOR, HINT_RANK, PLAY, Action, PlayerView

GRID = 20
NICHE_WIDTH = 0.05

NicheCoord = Tuple[int, int]


@dataclass
class BehaviorStats:
    """Raw behavior counters pooled over an evaluation's games."""

    hint_opportunities: int = 0
    hints_given: int = 0
    play_events: int = 0
    playability_values: List[float] = field(default_factory=list)

    @property
    def playability_sum(self) -> float:
        # fsum is exact, so merge order can never change the result
        return math.fsum(self.playability_values)

    def merge(self, other: "BehaviorStats") -> "BehaviorStats":
        self.hint_opportunities += other.hint_opportunities
        self.hints_given += other.hints_given
        self.play_events += other.play_events
        self.playability_values.extend(other.playability_values)
        return self


@dataclass(frozen=True)
class BehaviorDescriptor:
    c: float  # communicativeness in [0,1]
    r: float  # risk aversion in [0,1]


def accumulate(stats: BehaviorStats, view: PlayerView, action: Action) -> BehaviorStats:
    """Fold one (view, chosen action) pair into the counters. Mutates and
    returns `stats`. Playability is measured from the actor's view at the
    moment of the play, reusing the view's belief cache."""
    kind = action.kind
    if view.info_tokens >= 1:
        stats.hint_opportunities += 1
        if kind == HINT_COLOR or kind == HINT_RANK:
            stats.hints_given += 1
    if kind == PLAY:
        stats.play_events += 1
        stats.playability_values.append(
            belief.playability_probability(view, action.slot)
        )
    return stats


def finalize(stats: BehaviorStats) -> Optional[BehaviorDescriptor]:
    """Descriptor from pooled counts, or None when either ratio is 0/0."""
    if stats.hint_opportunities == 0 or stats.play_events == 0:
        return None
    return BehaviorDescriptor(
        c=stats.hints_given / stats.hint_opportunities,
        r=stats.playability_sum / stats.play_events,
    )


def _axis_index(value: float) -> int:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"descriptor value {value} outside [0,1]")
    # Exact floor of value/0.05 for the float given: Fraction(value) is the
    # float's true rational, so boundary values land per the half-open
    # convention instead of drifting on binary rounding.
    idx = int(Fraction(value) * GRID)
    return GRID - 1 if idx >= GRID else idx


def niche_of(descriptor: BehaviorDescriptor) -> NicheCoord:
    """Grid cell of a descriptor: floor(value / 0.05), last cell closed."""
    return (_axis_index(descriptor.c), _axis_index(descriptor.r))


def niche_label(coord: NicheCoord) -> Tuple[float, float]:
    """Lower-corner label of a niche, e.g. (8, 19) -> (0.40, 0.95)."""
    return (coord[0] * NICHE_WIDTH, coord[1] * NICHE_WIDTH)
