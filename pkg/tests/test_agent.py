"""Chromosome decision procedure and genetic operators."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hanabi_qd.agent import (
    CHROMOSOME_LENGTH,
    Agent,
    crossover,
    decide,
    format_chromosome,
    make_offspring,
    mutate,
    parse_chromosome,
    random_chromosome,
    validate_chromosome,
)
from hanabi_qd.engine import DISCARD, HINT_RANK, PLAY, STANDARD, new_game
from hanabi_qd.rules import NUM_RULES

PLAY_SAFE = 0          # play_safe, unconditional
TELL_PLAYABLE = 54     # tell_playable, unconditional
DISCARD_OLDEST = 117   # discard_oldest, unconditional
TELL_UNKNOWN_RANK = 81


def chromo(*genes):
    out = list(genes) + [genes[-1]] * (CHROMOSOME_LENGTH - len(genes))
    return tuple(out)


def test_validate_chromosome():
    with pytest.raises(ValueError):
        validate_chromosome([0] * 14)
    with pytest.raises(ValueError):
        validate_chromosome([0] * 14 + [135])
    assert validate_chromosome(range(15)) == tuple(range(15))


def test_parse_format_roundtrip():
    genes = tuple(random.Random(1).randrange(NUM_RULES) for _ in range(15))
    assert parse_chromosome(format_chromosome(genes)) == genes


def test_first_firing_rule_wins():
    state = new_game(5)
    state.hands[0][2] = STANDARD.cid("R", 1)
    state.know_color[0][2] = 1 << STANDARD.colors.index("R")
    state.know_rank[0][2] = 1
    view = state.view(0)
    action = decide(chromo(PLAY_SAFE, DISCARD_OLDEST), view)
    assert action.kind == PLAY and action.slot == 2
    # reordered: discard fires first when legal... tokens full so discard
    # returns None and play still wins
    action = decide(chromo(DISCARD_OLDEST, PLAY_SAFE), view)
    assert action.kind == PLAY


def test_fallback_discard_oldest_when_nothing_fires():
    state = new_game(5)
    state.info_tokens = 3
    view = state.view(0)
    # all-hint chromosome with no tokens... tokens=0 blocks hints
    state.info_tokens = 0
    view = state.view(0)
    action = decide(chromo(TELL_PLAYABLE), view)
    assert action.kind == DISCARD and action.slot == 0


def test_fallback_canonical_hint_at_full_tokens():
    state = new_game(5)
    assert state.info_tokens == 8
    # chromosome of discard rules only: all blocked at full tokens
    view = state.view(0)
    action = decide(chromo(DISCARD_OLDEST), view)
    assert action.kind == HINT_RANK
    assert action.rank == STANDARD.rank_of[state.hands[1][0]]


def test_decide_always_legal_random_chromosomes():
    rng = random.Random(0)
    for trial in range(25):
        agent = Agent(random_chromosome(rng))
        state = new_game(trial)
        while not state.is_terminal:
            view = state.view(state.current_player)
            action = agent.decide(view)
            assert action in state.legal_actions()
            state.step(action)


def test_duplicate_gene_never_fires_twice():
    # a chromosome with a duplicate behaves like one whose duplicate is
    # replaced by any rule that never fires
    dup = chromo(PLAY_SAFE, TELL_UNKNOWN_RANK, PLAY_SAFE, DISCARD_OLDEST)
    # tell_unknown_rank guarded on lives_eq_1 never fires at 3 lives
    never = 81 + 5  # tell_unknown_rank, lives_eq_1
    swapped = list(dup)
    swapped[2] = never
    a = Agent(dup)
    b = Agent(tuple(swapped))
    rng = random.Random(9)
    for seed in range(12):
        state = new_game(seed)
        while not state.is_terminal and state.turn_count < 40:
            view = state.view(state.current_player)
            assert a.decide(view) == b.decide(view)
            state.step(rng.choice(state.legal_actions()))


def test_decide_deterministic_on_same_view():
    state = new_game(31)
    view = state.view(0)
    agent = Agent(random_chromosome(random.Random(2)))
    assert agent.decide(view) == agent.decide(view)


# ----------------------------------------------------------------------
# Operators
# ----------------------------------------------------------------------

def test_mutate_preserves_shape_and_range():
    rng = random.Random(5)
    genes = random_chromosome(rng)
    for _ in range(200):
        out = mutate(genes, rng)
        assert len(out) == CHROMOSOME_LENGTH
        assert all(0 <= g < NUM_RULES for g in out)


def test_mutate_statistics_small():
    rng = random.Random(11)
    genes = tuple([7] * 15)
    changed = 0
    trials = 20_000
    for _ in range(trials):
        out = mutate(genes, rng)
        changed += sum(1 for a, b in zip(genes, out) if a != b)
    expected = trials * 15 * 0.1 * (134 / 135)
    sd = (trials * 15 * 0.1 * 0.9) ** 0.5  # binomial-ish bound
    assert abs(changed - expected) < 4 * sd


def test_crossover_identity_and_membership():
    rng = random.Random(6)
    a = tuple(range(15))
    b = tuple(range(100, 115))
    assert crossover(a, a, rng) == a
    for _ in range(100):
        child = crossover(a, b, rng)
        assert all(child[i] in (a[i], b[i]) for i in range(15))


def test_crossover_rate_small():
    rng = random.Random(13)
    a = tuple([1] * 15)
    b = tuple([2] * 15)
    from_a = 0
    trials = 20_000
    for _ in range(trials):
        child = crossover(a, b, rng)
        from_a += sum(1 for g in child if g == 1)
    expected = trials * 15 * 0.5
    sd = (trials * 15 * 0.25) ** 0.5
    assert abs(from_a - expected) < 4 * sd


def test_make_offspring_paths():
    class ScriptedRng:
        """random()/randrange() fed from a script; crossover coin first."""

        def __init__(self, coins):
            self.coins = list(coins)

        def random(self):
            return self.coins.pop(0)

        def randrange(self, n):
            return 0

    elite = tuple([10] * 15)
    mate = tuple([20] * 15)
    # coin 0.9 -> no crossover; then 15 mutation draws all above 0.1
    rng = ScriptedRng([0.9] + [0.5] * 15)
    assert make_offspring(elite, mate, rng) == elite
    # coin 0.1 -> crossover (15 gene picks), then 15 no-mutation draws
    rng = ScriptedRng([0.1] + [0.99] * 15 + [0.5] * 15)
    child = make_offspring(elite, mate, rng)
    assert all(g in (10, 20) for g in child)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**60))
def test_operators_never_change_length(seed):
    rng = random.Random(seed)
    a = random_chromosome(rng)
    b = random_chromosome(rng)
    assert len(mutate(a, rng)) == 15
    assert len(crossover(a, b, rng)) == 15
    assert len(make_offspring(a, b, rng)) == 15
