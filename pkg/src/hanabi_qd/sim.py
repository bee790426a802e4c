"""Game loop driving two policies against the engine.

A policy is any callable from PlayerView to a legal Action; the loop owns
the state, builds the acting player's view each turn, optionally feeds
behavior statistics and a corpus sink, and runs to termination. Each game
owns its state and RNG stream, so many games can run concurrently.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .descriptors import BehaviorStats, accumulate
from .engine import STANDARD, GameState, Variant, new_game_from

Policy = Callable[[object], object]

# safety net against a policy/engine bug looping forever; no legal game
# comes near this many turns
MAX_TURNS = 1000


@dataclass
class GameResult:
    score: int
    turns: int
    state: GameState


def play_game(
    policy0: Policy,
    policy1: Policy,
    rng: random.Random,
    variant: Variant = STANDARD,
    stats0: Optional[BehaviorStats] = None,
    stats1: Optional[BehaviorStats] = None,
    view_sink: Optional[Callable] = None,
) -> GameResult:
    """One complete game; the deal is drawn from `rng`.

    `stats0`/`stats1` receive per-seat behavior accumulation (pass the
    same object twice to pool a self-play pair). `view_sink(view, turn)`
    sees every pre-action view of the acting player.
    """
    state = new_game_from(rng, variant)
    policies = (policy0, policy1)
    stats = (stats0, stats1)
    step = state.step
    while state.terminal_reason is None and state.turn_count < MAX_TURNS:
        me = state.current_player
        view = state.view(me)
        action = policies[me](view)
        seat_stats = stats[me]
        if seat_stats is not None:
            accumulate(seat_stats, view, action)
        if view_sink is not None:
            view_sink(view, state.turn_count)
        step(action)
    return GameResult(score=state.score_val, turns=state.turn_count, state=state)
