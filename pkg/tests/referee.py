"""A second, deliberately naive Hanabi referee used to cross-check the
engine. Cards are (color, rank) tuples, piles are dicts, and nothing is
shared with the package except the deal convention (canonical deck order
and Mersenne shuffle), which is what makes a (seed, actions) pair well
defined.
"""

from __future__ import annotations

import random

COLORS = ["B", "R", "Y", "W", "G"]
COPIES = {1: 3, 2: 2, 3: 2, 4: 2, 5: 1}
HAND = 5
MAX_TOKENS = 8
MAX_LIVES = 3


class RefereeError(Exception):
    pass


def canonical_deck():
    deck = []
    for color in COLORS:
        for rank in (1, 2, 3, 4, 5):
            deck.extend([(color, rank)] * COPIES[rank])
    return deck


def referee_play(seed, action_strings):
    """Replay an action-string list; returns the final summary dict."""
    deck = canonical_deck()
    random.Random(seed).shuffle(deck)
    hands = {0: [], 1: []}
    for player in (0, 1):
        for _ in range(HAND):
            hands[player].append(deck.pop())
    fireworks = {color: 0 for color in COLORS}
    discard = []
    tokens = MAX_TOKENS
    lives = MAX_LIVES
    current = 0
    final_countdown = None
    terminal = None
    turns = 0

    for text in action_strings:
        if terminal is not None:
            raise RefereeError("action after game end")
        kind, arg = text[0], text[1:]
        hand = hands[current]
        other = 1 - current
        deck_had_cards = len(deck) > 0
        if kind in ("p", "d"):
            slot = int(arg)
            if slot < 0 or slot >= len(hand):
                raise RefereeError(f"bad slot {slot}")
            if kind == "d" and tokens >= MAX_TOKENS:
                raise RefereeError("discard at full tokens")
            card = hand.pop(slot)
            if kind == "p":
                color, rank = card
                if fireworks[color] == rank - 1:
                    fireworks[color] = rank
                    if rank == 5 and tokens < MAX_TOKENS:
                        tokens += 1
                else:
                    discard.append(card)
                    lives -= 1
            else:
                discard.append(card)
                tokens += 1
            if deck:
                hand.append(deck.pop())
        elif kind in ("c", "r"):
            if tokens <= 0:
                raise RefereeError("hint without token")
            if kind == "c":
                if arg not in COLORS:
                    raise RefereeError(f"bad color {arg}")
                touched = [card for card in hands[other] if card[0] == arg]
            else:
                rank = int(arg)
                if rank < 1 or rank > 5:
                    raise RefereeError(f"bad rank {rank}")
                touched = [card for card in hands[other] if card[1] == rank]
            if not touched:
                raise RefereeError("empty hint")
            tokens -= 1
        else:
            raise RefereeError(f"bad action {text!r}")

        turns += 1
        score = sum(fireworks.values())
        if score == 25:
            terminal = "victory"
        elif lives == 0:
            terminal = "lives_exhausted"
        elif not deck:
            if final_countdown is None:
                final_countdown = 2 if deck_had_cards else 1
            else:
                final_countdown -= 1
                if final_countdown == 0:
                    terminal = "deck_exhausted"
        current = other

    def card_id(card):
        return COLORS.index(card[0]) * 5 + card[1] - 1

    return {
        "score": sum(fireworks.values()),
        "lives": lives,
        "tokens": tokens,
        "discard": sorted(card_id(card) for card in discard),
        "terminal_reason": terminal,
        "turn_count": turns,
    }
