"""Chromosomes and the rule-list decision procedure.

A chromosome is 15 rule ids; the agent walks them in order and takes the
first rule that fires. Duplicate and dead genes are legal genotype
content. When nothing fires the fallback is: discard the oldest card if a
token can be recovered, otherwise spend a token on the canonical hint
(the rank of the partner's oldest card). Both branches are always legal
in complementary token regimes, and fallback actions are real behavior:
they count toward the behavior descriptors like any other action.
"""

from __future__ import annotations

import random
from typing import Iterable, Tuple

from .engine import PlayerView
from .rules import NUM_RULES, catalog, guard_flags

CHROMOSOME_LENGTH = 15
MUTATION_RATE = 0.1
CROSSOVER_RATE = 0.5

Chromosome = Tuple[int, ...]


def validate_chromosome(genes: Iterable[int]) -> Chromosome:
    genes = tuple(genes)
    if len(genes) != CHROMOSOME_LENGTH:
        raise ValueError(f"chromosome must have {CHROMOSOME_LENGTH} genes, got {len(genes)}")
    for g in genes:
        if not 0 <= g < NUM_RULES:
            raise ValueError(f"gene {g} outside 0..{NUM_RULES - 1}")
    return genes


def random_chromosome(rng: random.Random) -> Chromosome:
    return tuple(rng.randrange(NUM_RULES) for _ in range(CHROMOSOME_LENGTH))


def parse_chromosome(text: str) -> Chromosome:
    """Text form: 15 comma-separated rule ids."""
    return validate_chromosome(int(part) for part in text.split(","))


def format_chromosome(genes: Chromosome) -> str:
    return ",".join(str(g) for g in genes)


class Agent:
    """A chromosome compiled against the catalog for repeated decisions."""

    __slots__ = ("genes", "_compiled")

    def __init__(self, genes: Iterable[int]):
        self.genes = validate_chromosome(genes)
        rules = catalog()
        self._compiled = tuple((rules[g].guard_index, rules[g].body) for g in self.genes)

    def decide(self, view: PlayerView):
        flags = guard_flags(view)
        for guard_index, body in self._compiled:
            if flags[guard_index]:
                action = body(view)
                if action is not None:
                    return action
        return fallback_action(view)

    def __repr__(self) -> str:
        return f"Agent({format_chromosome(self.genes)})"


def fallback_action(view: PlayerView):
    """Always-legal default when no rule fires."""
    v = view.variant
    if view.info_tokens < v.max_info_tokens and view.hand_size > 0:
        return v.discard_actions[0]
    if view.info_tokens > 0 and view.partner_hand:
        rank = v.rank_of[view.partner_hand[0]]
        return v.hint_rank_actions[view.partner][rank - 1]
    if view.hand_size > 0:
        return v.play_actions[0]
    raise RuntimeError("no legal fallback action (empty hand and no hint target)")


def decide(genes: Iterable[int], view: PlayerView):
    """One-shot decision; build an Agent when deciding repeatedly."""
    return Agent(genes).decide(view)


# ----------------------------------------------------------------------
# Genetic operators. Draw order from the rng is part of the contract:
# mutate draws one uniform per gene and one randrange per replaced gene;
# crossover draws one uniform per gene; make_offspring draws its
# crossover coin first.
# ----------------------------------------------------------------------

def mutate(genes: Chromosome, rng: random.Random) -> Chromosome:
    """Each gene independently replaced by a uniform rule id with
    probability 0.1 (the replacement may redraw the same id)."""
    out = list(genes)
    for i in range(CHROMOSOME_LENGTH):
        if rng.random() < MUTATION_RATE:
            out[i] = rng.randrange(NUM_RULES)
    return tuple(out)


def crossover(a: Chromosome, b: Chromosome, rng: random.Random) -> Chromosome:
    """Uniform crossover: each position from a or b with probability 0.5."""
    return tuple(
        a[i] if rng.random() < 0.5 else b[i] for i in range(CHROMOSOME_LENGTH)
    )


def make_offspring(elite: Chromosome, mate: Chromosome, rng: random.Random) -> Chromosome:
    """Crossover with probability 0.5 (else clone the elite), then mutate."""
    child = crossover(elite, mate, rng) if rng.random() < CROSSOVER_RATE else elite
    return mutate(child, rng)
