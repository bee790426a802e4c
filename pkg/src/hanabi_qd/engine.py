"""Deterministic 2-player Hanabi engine.

Cards are encoded as small ints (`cid = color_index * max_rank + rank - 1`)
and per-slot hint knowledge is a pair of bitmasks (possible colors,
possible ranks) so the turn loop stays allocation-light; the `Card`
wrapper exists for display and tests. Hands keep age order:
slot 0 is always the oldest card, plays/discards remove the slot and fresh
draws append at the end.

Rule set (standard 2-player Hanabi): per color three 1s, two each of
2/3/4, one 5; 8 info tokens, 3 lives, hand size 5. Discarding requires a
spent token (illegal at 8), hints cost a token and must touch at least one
card, completing a 5 refunds a token, and once the last card is drawn each
player (including the drawer) gets exactly one more turn. Score is kept
as-is when the third life is lost.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, NamedTuple, Optional

# Action kinds
PLAY = 0
DISCARD = 1
HINT_COLOR = 2
HINT_RANK = 3

VICTORY = "victory"
LIVES_EXHAUSTED = "lives_exhausted"
DECK_EXHAUSTED = "deck_exhausted"

_MAX_RANKS = 8  # rank bitmasks are assumed to fit a byte


class IllegalActionError(ValueError):
    """Raised when an action violates a game rule; message names the rule."""


class GameOverError(RuntimeError):
    """Raised when acting on a terminal state."""


class Action(NamedTuple):
    kind: int            # PLAY / DISCARD / HINT_COLOR / HINT_RANK
    slot: int = -1       # hand position for PLAY/DISCARD
    target: int = -1     # hinted player for HINT_*
    color: str = ""      # hinted color letter for HINT_COLOR
    rank: int = 0        # hinted rank for HINT_RANK

    def __repr__(self) -> str:  # compact, e.g. Play(2), HintColor(->1, R)
        if self.kind == PLAY:
            return f"Play({self.slot})"
        if self.kind == DISCARD:
            return f"Discard({self.slot})"
        if self.kind == HINT_COLOR:
            return f"HintColor(->{self.target}, {self.color})"
        return f"HintRank(->{self.target}, {self.rank})"


class Card(NamedTuple):
    color: str
    rank: int


class TurnOutcome(NamedTuple):
    """What one apply() did, plus the post-turn public snapshot."""

    action: Action
    card: Optional[int]          # cid played or discarded
    success: Optional[bool]      # for PLAY: landed on the pile?
    drew: bool
    touched: Optional[tuple]     # hinted slots
    score: int
    info_tokens: int
    lives: int
    terminal_reason: Optional[str]


@dataclass(frozen=True)
class Variant:
    """Deck/table parameters. STANDARD is the full 50-card game."""

    colors: tuple = ("B", "R", "Y", "W", "G")
    copies: tuple = (3, 2, 2, 2, 1)   # copies[rank-1]
    hand_size: int = 5
    max_info_tokens: int = 8
    max_lives: int = 3

    def __post_init__(self):
        if len(self.copies) > _MAX_RANKS:
            raise ValueError(f"at most {_MAX_RANKS} ranks supported")

    @cached_property
    def num_colors(self) -> int:
        return len(self.colors)

    @cached_property
    def max_rank(self) -> int:
        return len(self.copies)

    @cached_property
    def num_ids(self) -> int:
        return self.num_colors * self.max_rank

    @cached_property
    def deck_size(self) -> int:
        return self.num_colors * sum(self.copies)

    @cached_property
    def full_color_mask(self) -> int:
        return (1 << self.num_colors) - 1

    @cached_property
    def full_rank_mask(self) -> int:
        return (1 << self.max_rank) - 1

    @cached_property
    def max_score(self) -> int:
        return self.num_ids

    @cached_property
    def canonical_deck(self) -> tuple:
        """Unshuffled deck: color-major, rank ascending, copies adjacent."""
        out = []
        for c in range(self.num_colors):
            for r in range(self.max_rank):
                out.extend([c * self.max_rank + r] * self.copies[r])
        return tuple(out)

    @cached_property
    def initial_counts(self) -> tuple:
        counts = [0] * self.num_ids
        for cid in self.canonical_deck:
            counts[cid] += 1
        return tuple(counts)

    @cached_property
    def color_of(self) -> tuple:
        return tuple(cid // self.max_rank for cid in range(self.num_ids))

    @cached_property
    def rank_of(self) -> tuple:
        return tuple(cid % self.max_rank + 1 for cid in range(self.num_ids))

    @cached_property
    def indices_in_mask(self) -> tuple:
        """Set-bit positions for every mask over the wider of the two
        attribute alphabets; avoids bit twiddling in belief loops."""
        width = max(self.num_colors, self.max_rank)
        return tuple(
            tuple(i for i in range(width) if mask & (1 << i))
            for mask in range(1 << width)
        )

    # Interned actions: rules fire every turn, so avoid re-allocating.
    @cached_property
    def play_actions(self) -> tuple:
        return tuple(Action(PLAY, slot=s) for s in range(self.hand_size))

    @cached_property
    def discard_actions(self) -> tuple:
        return tuple(Action(DISCARD, slot=s) for s in range(self.hand_size))

    @cached_property
    def hint_color_actions(self) -> tuple:
        return tuple(
            tuple(Action(HINT_COLOR, target=t, color=c) for c in self.colors)
            for t in range(2)
        )

    @cached_property
    def hint_rank_actions(self) -> tuple:
        return tuple(
            tuple(Action(HINT_RANK, target=t, rank=r) for r in range(1, self.max_rank + 1))
            for t in range(2)
        )

    def card(self, cid: int) -> Card:
        return Card(self.colors[self.color_of[cid]], self.rank_of[cid])

    def cid(self, color: str, rank: int) -> int:
        return self.colors.index(color) * self.max_rank + rank - 1


STANDARD = Variant()


class PlayerView:
    """One player's observable slice of the state, plus lazy belief caches.

    Immutable snapshot: safe to keep after the underlying game moves on.
    Everything here is information the player legitimately has (own hand
    identities are absent; both players' hint knowledge is public).
    Knowledge masks are exposed unpacked: `own_kc[slot]` is the bitmask of
    colors the slot could still be, `own_kr[slot]` the rank bitmask.
    """

    __slots__ = (
        "variant", "me", "partner_hand", "own_kc", "own_kr",
        "partner_kc", "partner_kr", "fireworks", "discard",
        "info_tokens", "lives", "deck_size", "hand_size", "cache",
    )

    def __init__(self, variant, me, partner_hand, own_kc, own_kr,
                 partner_kc, partner_kr, fireworks, discard,
                 info_tokens, lives, deck_size, hand_size):
        self.variant = variant
        self.me = me
        self.partner_hand = partner_hand
        self.own_kc = own_kc
        self.own_kr = own_kr
        self.partner_kc = partner_kc
        self.partner_kr = partner_kr
        self.fireworks = fireworks
        self.discard = discard
        self.info_tokens = info_tokens
        self.lives = lives
        self.deck_size = deck_size
        self.hand_size = hand_size
        self.cache = {}

    @property
    def partner(self) -> int:
        return 1 - self.me

    def canonical_key(self) -> str:
        """Stable serialization of every observable field (no hidden info)."""
        key = self.cache.get("key")
        if key is None:
            key = json.dumps(
                {
                    "d": list(self.discard),
                    "f": list(self.fireworks),
                    "ko": [[c, r] for c, r in zip(self.own_kc, self.own_kr)],
                    "kp": [[c, r] for c, r in zip(self.partner_kc, self.partner_kr)],
                    "l": self.lives,
                    "p": list(self.partner_hand),
                    "t": self.info_tokens,
                    "z": self.deck_size,
                },
                sort_keys=True,
                separators=(",", ":"),
            )
            self.cache["key"] = key
        return key

    def to_record(self) -> dict:
        return json.loads(self.canonical_key())

    @classmethod
    def from_record(cls, record: dict, variant: Variant = STANDARD) -> "PlayerView":
        ko = record["ko"]
        kp = record["kp"]
        return cls(
            variant=variant,
            me=0,
            partner_hand=tuple(record["p"]),
            own_kc=tuple(c for c, _ in ko),
            own_kr=tuple(r for _, r in ko),
            partner_kc=tuple(c for c, _ in kp),
            partner_kr=tuple(r for _, r in kp),
            fireworks=tuple(record["f"]),
            discard=tuple(record["d"]),
            info_tokens=record["t"],
            lives=record["l"],
            deck_size=record["z"],
            hand_size=len(ko),
        )

    def legal_action_count(self) -> int:
        """Number of legal actions the acting player has (view-computable)."""
        v = self.variant
        n = self.hand_size                      # plays
        if self.info_tokens < v.max_info_tokens:
            n += self.hand_size                 # discards
        if self.info_tokens > 0:
            color_of, rank_of = v.color_of, v.rank_of
            n += len({color_of[cid] for cid in self.partner_hand})
            n += len({rank_of[cid] for cid in self.partner_hand})
        return n


class GameState:
    """Authoritative state of one 2-player game. Mutated by step()/apply().

    `know_color[player][slot]` / `know_rank[player][slot]` hold the hint
    bitmasks. `remaining[cid]` counts copies still in the deck or a hand (it equals
    initial copies minus discarded minus successfully played).
    """

    __slots__ = (
        "variant", "deck", "hands", "know_color", "know_rank", "fireworks",
        "discard", "remaining", "info_tokens", "lives", "current_player",
        "final_turns", "terminal_reason", "turn_count", "score_val",
        # hot variant tables hoisted out of the frozen dataclass: step()
        # runs a million times per evolve run and the indirection shows
        "_color_of", "_rank_of", "_max_rank", "_max_info", "_max_score",
        "_full_color", "_full_rank",
    )

    _STATE_FIELDS = (
        "deck", "hands", "know_color", "know_rank", "fireworks", "discard",
        "remaining", "info_tokens", "lives", "current_player", "final_turns",
        "terminal_reason", "turn_count", "score_val",
    )

    def __init__(self, variant: Variant = STANDARD):
        self.variant = variant
        self.deck: list = []
        self.hands = [[], []]
        self.know_color = [[], []]
        self.know_rank = [[], []]
        self.fireworks = [0] * variant.num_colors
        self.discard = [0] * variant.num_ids
        self.remaining = list(variant.initial_counts)
        self.info_tokens = variant.max_info_tokens
        self.lives = variant.max_lives
        self.current_player = 0
        self.final_turns: Optional[int] = None
        self.terminal_reason: Optional[str] = None
        self.turn_count = 0
        self.score_val = 0
        self._color_of = variant.color_of
        self._rank_of = variant.rank_of
        self._max_rank = variant.max_rank
        self._max_info = variant.max_info_tokens
        self._max_score = variant.max_score
        self._full_color = variant.full_color_mask
        self._full_rank = variant.full_rank_mask

    # ------------------------------------------------------------------
    @property
    def score(self) -> int:
        return self.score_val

    @property
    def is_terminal(self) -> bool:
        return self.terminal_reason is not None

    def copy(self) -> "GameState":
        new = GameState.__new__(GameState)
        new.variant = self.variant
        new.deck = self.deck.copy()
        new.hands = [self.hands[0].copy(), self.hands[1].copy()]
        new.know_color = [self.know_color[0].copy(), self.know_color[1].copy()]
        new.know_rank = [self.know_rank[0].copy(), self.know_rank[1].copy()]
        new.fireworks = self.fireworks.copy()
        new.discard = self.discard.copy()
        new.remaining = self.remaining.copy()
        new.info_tokens = self.info_tokens
        new.lives = self.lives
        new.current_player = self.current_player
        new.final_turns = self.final_turns
        new.terminal_reason = self.terminal_reason
        new.turn_count = self.turn_count
        new.score_val = self.score_val
        new._color_of = self._color_of
        new._rank_of = self._rank_of
        new._max_rank = self._max_rank
        new._max_info = self._max_info
        new._max_score = self._max_score
        new._full_color = self._full_color
        new._full_rank = self._full_rank
        return new

    def __eq__(self, other) -> bool:
        if not isinstance(other, GameState):
            return NotImplemented
        if self.variant != other.variant:
            return False
        return all(
            getattr(self, name) == getattr(other, name)
            for name in GameState._STATE_FIELDS
        )

    # ------------------------------------------------------------------
    def legal_actions(self) -> list:
        """All legal actions for the current player, in a fixed order."""
        if self.terminal_reason is not None:
            raise GameOverError("game over")
        v = self.variant
        me = self.current_player
        hand_len = len(self.hands[me])
        actions = list(v.play_actions[:hand_len])
        if self.info_tokens < v.max_info_tokens:
            actions.extend(v.discard_actions[:hand_len])
        if self.info_tokens > 0:
            partner = 1 - me
            phand = self.hands[partner]
            color_of, rank_of = v.color_of, v.rank_of
            colors_present = {color_of[cid] for cid in phand}
            ranks_present = {rank_of[cid] for cid in phand}
            hc = v.hint_color_actions[partner]
            hr = v.hint_rank_actions[partner]
            actions.extend(hc[c] for c in range(v.num_colors) if c in colors_present)
            actions.extend(hr[r - 1] for r in range(1, v.max_rank + 1) if r in ranks_present)
        return actions

    def view(self, player: int) -> PlayerView:
        partner = 1 - player
        partner_hand = tuple(self.hands[partner])
        view = PlayerView(
            variant=self.variant,
            me=player,
            partner_hand=partner_hand,
            own_kc=tuple(self.know_color[player]),
            own_kr=tuple(self.know_rank[player]),
            partner_kc=tuple(self.know_color[partner]),
            partner_kr=tuple(self.know_rank[partner]),
            fireworks=tuple(self.fireworks),
            discard=tuple(self.discard),
            info_tokens=self.info_tokens,
            lives=self.lives,
            deck_size=len(self.deck),
            hand_size=len(self.hands[player]),
        )
        # Seed the belief caches from counts the state already maintains:
        # `remaining` is exactly the public not-discarded-not-played count,
        # and what the viewer cannot see is that minus the partner's hand.
        cache = view.cache
        public = self.remaining.copy()
        cache["public"] = public
        unseen = public.copy()
        for cid in partner_hand:
            unseen[cid] -= 1
        cache["unseen"] = unseen
        return view

    # ------------------------------------------------------------------
    def step(self, action: Action) -> None:
        """Apply one action in place (hot path, no reporting).

        Raises IllegalActionError naming the violated rule, GameOverError
        on a terminal state. The turn advances and the endgame countdown
        ticks here, so callers drive a whole game by looping step().
        Indexed access into `action` is deliberate: this function
        dominates simulation throughput.
        """
        if self.terminal_reason is not None:
            raise GameOverError("game over")
        me = self.current_player
        kind = action[0]
        deck = self.deck
        drew = False

        if kind <= DISCARD:  # PLAY or DISCARD
            slot = action[1]
            if slot < 0:
                raise IllegalActionError(f"slot {slot} is not an occupied hand position")
            if kind == DISCARD and self.info_tokens >= self._max_info:
                raise IllegalActionError("cannot discard with all info tokens available")
            hand = self.hands[me]
            try:
                card = hand.pop(slot)
            except IndexError:
                raise IllegalActionError(
                    f"slot {slot} is not an occupied hand position"
                ) from None
            self.know_color[me].pop(slot)
            self.know_rank[me].pop(slot)
            self.remaining[card] -= 1
            if kind == PLAY:
                color = self._color_of[card]
                rank = self._rank_of[card]
                fw = self.fireworks
                if fw[color] + 1 == rank:
                    fw[color] = rank
                    self.score_val += 1
                    if rank == self._max_rank and self.info_tokens < self._max_info:
                        self.info_tokens += 1
                else:
                    self.discard[card] += 1
                    self.lives -= 1
            else:
                self.discard[card] += 1
                self.info_tokens += 1
            if deck:
                hand.append(deck.pop())
                self.know_color[me].append(self._full_color)
                self.know_rank[me].append(self._full_rank)
                drew = True
        elif kind <= HINT_RANK:  # HINT_COLOR or HINT_RANK
            if self.info_tokens <= 0:
                raise IllegalActionError("no info token available for a hint")
            target = action[2]
            if target == me or not 0 <= target <= 1:
                raise IllegalActionError("hint target must be the partner")
            thand = self.hands[target]
            if kind == HINT_COLOR:
                try:
                    cidx = self.variant.colors.index(action[3])
                except ValueError:
                    raise IllegalActionError(f"unknown color {action[3]!r}") from None
                color_of = self._color_of
                for cid in thand:  # validate before mutating
                    if color_of[cid] == cidx:
                        break
                else:
                    raise IllegalActionError("hint must touch at least one card")
                bit = 1 << cidx
                keep = ~bit
                kc = self.know_color[target]
                for i, cid in enumerate(thand):
                    if color_of[cid] == cidx:
                        kc[i] = bit
                    else:
                        kc[i] &= keep
            else:
                rank = action[4]
                if not 1 <= rank <= self._max_rank:
                    raise IllegalActionError(f"rank {rank} out of range")
                rank_of = self._rank_of
                for cid in thand:
                    if rank_of[cid] == rank:
                        break
                else:
                    raise IllegalActionError("hint must touch at least one card")
                bit = 1 << (rank - 1)
                keep = ~bit
                kr = self.know_rank[target]
                for i, cid in enumerate(thand):
                    if rank_of[cid] == rank:
                        kr[i] = bit
                    else:
                        kr[i] &= keep
            self.info_tokens -= 1
        else:
            raise IllegalActionError(f"unknown action kind {kind}")

        # Endgame bookkeeping. Victory and life loss are checked before the
        # deck countdown; the turn that draws the last card starts the
        # two-turn countdown but does not consume it.
        if self.score_val == self._max_score:
            self.terminal_reason = VICTORY
        elif self.lives == 0:
            self.terminal_reason = LIVES_EXHAUSTED
        elif not deck:
            if self.final_turns is None:
                # normally set on the turn that draws the last card; the
                # fallback covers variants whose deal consumes the deck
                self.final_turns = 2 if drew else 1
            else:
                self.final_turns -= 1
                if self.final_turns == 0:
                    self.terminal_reason = DECK_EXHAUSTED

        self.current_player = 1 - me
        self.turn_count += 1

    def apply(self, action: Action) -> TurnOutcome:
        """step() plus a TurnOutcome describing what happened."""
        v = self.variant
        me = self.current_player
        card = None
        success = None
        touched = None
        could_draw = bool(self.deck)
        kind = action.kind
        if kind <= DISCARD:
            hand = self.hands[me]
            if 0 <= action.slot < len(hand):
                card = hand[action.slot]
                if kind == PLAY:
                    success = self.fireworks[v.color_of[card]] + 1 == v.rank_of[card]
        elif kind == HINT_COLOR and action.color in v.colors and 0 <= action.target <= 1:
            cidx = v.colors.index(action.color)
            touched = tuple(
                i for i, cid in enumerate(self.hands[action.target])
                if v.color_of[cid] == cidx
            )
        elif kind == HINT_RANK and 0 <= action.target <= 1:
            touched = tuple(
                i for i, cid in enumerate(self.hands[action.target])
                if v.rank_of[cid] == action.rank
            )
        self.step(action)
        return TurnOutcome(
            action=action, card=card, success=success,
            drew=could_draw and kind <= DISCARD, touched=touched,
            score=self.score_val, info_tokens=self.info_tokens,
            lives=self.lives, terminal_reason=self.terminal_reason,
        )


# ----------------------------------------------------------------------
# Functional surface
# ----------------------------------------------------------------------

def new_game_from(rng: random.Random, variant: Variant = STANDARD) -> GameState:
    """Shuffle and deal drawing the permutation from a live RNG stream.

    Bulk simulation uses this form: seeding a fresh Mersenne Twister per
    game costs more than the shuffle itself, so evaluation loops seed one
    stream and deal many games from it.
    """
    state = GameState(variant)
    deck = list(variant.canonical_deck)
    rng.shuffle(deck)
    n = variant.hand_size
    top = len(deck)
    # pop order: end of list first, player 0 then player 1
    state.hands[0] = deck[top - 1:top - n - 1:-1]
    state.hands[1] = deck[top - n - 1:top - 2 * n - 1:-1]
    del deck[top - 2 * n:]
    state.deck = deck
    fc = variant.full_color_mask
    fr = variant.full_rank_mask
    state.know_color[0] = [fc] * n
    state.know_color[1] = [fc] * n
    state.know_rank[0] = [fr] * n
    state.know_rank[1] = [fr] * n
    return state


def new_game(seed: int, variant: Variant = STANDARD) -> GameState:
    """Fresh shuffled-and-dealt game; same seed, same state, any platform."""
    return new_game_from(random.Random(seed), variant)


def legal_actions(state: GameState) -> list:
    return state.legal_actions()


def apply_action(state: GameState, action: Action) -> tuple:
    """Pure form of GameState.apply: returns (new_state, outcome)."""
    new = state.copy()
    outcome = new.apply(action)
    return new, outcome


def view_of(state: GameState, player: int) -> PlayerView:
    return state.view(player)


# ----------------------------------------------------------------------
# Trace format: one game per JSON record, replayable bit-for-bit.
# ----------------------------------------------------------------------

def action_to_str(action: Action) -> str:
    """Compact trace encoding: p2 / d0 / cR / r4 (hint target is implied)."""
    if action.kind == PLAY:
        return f"p{action.slot}"
    if action.kind == DISCARD:
        return f"d{action.slot}"
    if action.kind == HINT_COLOR:
        return f"c{action.color}"
    return f"r{action.rank}"


def action_from_str(text: str, acting_player: int, variant: Variant = STANDARD) -> Action:
    kind, arg = text[0], text[1:]
    target = 1 - acting_player
    if kind == "p":
        return Action(PLAY, slot=int(arg))
    if kind == "d":
        return Action(DISCARD, slot=int(arg))
    if kind == "c":
        return variant.hint_color_actions[target][variant.colors.index(arg)]
    if kind == "r":
        return variant.hint_rank_actions[target][int(arg) - 1]
    raise ValueError(f"bad action string {text!r}")


def trace_game(seed: int, actions: list, variant: Variant = STANDARD) -> dict:
    """Replay an action list from a seed, recording per-turn snapshots."""
    state = new_game(seed, variant)
    turns = []
    for text in actions:
        action = action_from_str(text, state.current_player, variant)
        outcome = state.apply(action)
        turns.append(
            {"score": outcome.score, "tokens": outcome.info_tokens, "lives": outcome.lives}
        )
    return {
        "seed": seed,
        "actions": list(actions),
        "turns": turns,
        "final": {
            "score": state.score,
            "lives": state.lives,
            "tokens": state.info_tokens,
            "discard": sorted(
                [cid for cid in range(variant.num_ids) for _ in range(state.discard[cid])]
            ),
            "terminal_reason": state.terminal_reason,
            "turn_count": state.turn_count,
        },
    }


def replay_trace(trace: dict, variant: Variant = STANDARD) -> GameState:
    """Re-run a trace, verifying every per-turn snapshot matches."""
    state = new_game(trace["seed"], variant)
    for i, text in enumerate(trace["actions"]):
        action = action_from_str(text, state.current_player, variant)
        outcome = state.apply(action)
        expect = trace["turns"][i]
        got = {"score": outcome.score, "tokens": outcome.info_tokens, "lives": outcome.lives}
        if got != expect:
            raise ValueError(f"trace diverged at turn {i}: {got} != {expect}")
    return state


def iter_cards(variant: Variant = STANDARD) -> Iterator[Card]:
    for cid in range(variant.num_ids):
        yield variant.card(cid)
