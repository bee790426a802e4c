"""Post-hoc pool analyses: pairwise cross-play, best partners, distance
profiles, chromosome and behavior diversity, and cross-run comparisons.

Everything is a pure function of (archives, seeds): per-cell RNG streams
are keyed by niche coordinates rather than pool order, so subsetting a
pool never changes the games any surviving pair plays.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats as scipy_stats

from .agent import Agent, Chromosome
from .descriptors import NicheCoord
from .engine import (
    DISCARD,
    HINT_COLOR,
    HINT_RANK,
    PLAY,
    STANDARD,
    Action,
    PlayerView,
    Variant,
    new_game_from,
)
from .qd import Archive, Elite
from .rng import stream
from .rules import catalog_hash

CORPUS_FORMAT = "hanabi-qd-corpus-v1"


# ----------------------------------------------------------------------
# Action codes: a dense int per distinct action, for array comparisons.
# ----------------------------------------------------------------------

def action_code(action: Action, variant: Variant = STANDARD) -> int:
    kind = action.kind
    if kind == PLAY:
        return action.slot
    h = variant.hand_size
    if kind == DISCARD:
        return h + action.slot
    if kind == HINT_COLOR:
        return 2 * h + variant.colors.index(action.color)
    if kind == HINT_RANK:
        return 2 * h + variant.num_colors + action.rank - 1
    raise ValueError(f"unknown action kind {kind}")


# ----------------------------------------------------------------------
# Cross-play
# ----------------------------------------------------------------------

@dataclass
class CrossplayMatrix:
    """Seat-pooled pair scores over a fixed elite pool (niche-sorted).

    scores[i, j] == scores[j, i] by construction: each unordered pair is
    simulated once, half the games with each seating, and the pooled mean
    fills both cells. The diagonal is self-play.
    """

    niches: Tuple[NicheCoord, ...]
    genes: Tuple[Chromosome, ...]
    scores: np.ndarray
    games: np.ndarray
    games_per_pair: int
    master_seed: int

    def index_of(self, niche: NicheCoord) -> int:
        return self.niches.index(niche)

    def cell(self, i: int, j: int) -> float:
        return float(self.scores[i, j])

    def per_agent_means(self) -> np.ndarray:
        """Mean score of each agent paired with the whole pool, itself
        included (row means over the full matrix)."""
        return self.scores.mean(axis=1)

    def mean_pairwise(self, include_diagonal: bool = False) -> float:
        n = len(self.niches)
        if include_diagonal:
            return float(self.scores.mean())
        if n < 2:
            raise ValueError("need at least two elites for off-diagonal mean")
        off = self.scores.sum() - np.trace(self.scores)
        return float(off / (n * (n - 1)))

    def mean_selfplay(self) -> float:
        return float(np.trace(self.scores) / len(self.niches))

    def to_rows(self) -> List[tuple]:
        rows = []
        for i, (ci, ri) in enumerate(self.niches):
            for j, (cj, rj) in enumerate(self.niches):
                rows.append(
                    (ci, ri, cj, rj, float(self.scores[i, j]), int(self.games[i, j]))
                )
        return rows


def play_pair(
    genes_a: Chromosome,
    genes_b: Chromosome,
    n_games: int,
    rng: random.Random,
    variant: Variant = STANDARD,
) -> List[int]:
    """Scores of n_games between two chromosomes, seat-balanced: the first
    ceil(n/2) games seat a first, the rest seat b first."""
    agent_a = Agent(genes_a)
    agent_b = Agent(genes_b)
    first_half = (n_games + 1) // 2
    scores = []
    for g in range(n_games):
        if g < first_half:
            seats = (agent_a.decide, agent_b.decide)
        else:
            seats = (agent_b.decide, agent_a.decide)
        state = new_game_from(rng, variant)
        step = state.step
        while state.terminal_reason is None:
            step(seats[state.current_player](state.view(state.current_player)))
        scores.append(state.score_val)
    return scores


def _pair_job(args):
    i, j, genes_i, genes_j, niche_i, niche_j, n_games, master_seed = args
    rng = stream(master_seed, "xp", niche_i[0], niche_i[1], niche_j[0], niche_j[1])
    if i == j:
        scores = play_pair(genes_i, genes_i, n_games, rng)
    else:
        scores = play_pair(genes_i, genes_j, n_games, rng)
    return i, j, math.fsum(scores) / len(scores), len(scores)


def crossplay(
    pool: Sequence[Elite],
    games_per_pair: int,
    master_seed: int,
    threads: int = 1,
    progress: Optional[Callable[[int, int], None]] = None,
) -> CrossplayMatrix:
    """Pairwise performance of every pool pair (diagonal included)."""
    if not pool:
        raise ValueError("empty pool")
    pool = sorted(pool, key=lambda e: e.niche)
    n = len(pool)
    jobs = []
    for i in range(n):
        for j in range(i, n):
            jobs.append(
                (i, j, pool[i].genes, pool[j].genes, pool[i].niche, pool[j].niche,
                 games_per_pair, master_seed)
            )
    scores = np.zeros((n, n), dtype=np.float64)
    games = np.zeros((n, n), dtype=np.int32)
    if threads > 1:
        import multiprocessing as mp
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(
            max_workers=threads, mp_context=mp.get_context("fork")
        ) as pool_ex:
            results = pool_ex.map(_pair_job, jobs, chunksize=16)
            for k, (i, j, mean_score, n_games) in enumerate(results):
                scores[i, j] = scores[j, i] = mean_score
                games[i, j] = games[j, i] = n_games
                if progress is not None:
                    progress(k + 1, len(jobs))
    else:
        for k, job in enumerate(jobs):
            i, j, mean_score, n_games = _pair_job(job)
            scores[i, j] = scores[j, i] = mean_score
            games[i, j] = games[j, i] = n_games
            if progress is not None:
                progress(k + 1, len(jobs))
    return CrossplayMatrix(
        niches=tuple(e.niche for e in pool),
        genes=tuple(e.genes for e in pool),
        scores=scores,
        games=games,
        games_per_pair=games_per_pair,
        master_seed=master_seed,
    )


def best_partners(matrix: CrossplayMatrix) -> Tuple[Dict[NicheCoord, NicheCoord], Dict[NicheCoord, int]]:
    """For each elite, its best partner (possibly itself); ties resolve to
    the lower niche (pool order is niche-sorted, argmax takes the first).
    Also the per-elite count of times chosen as someone's best partner."""
    assignments: Dict[NicheCoord, NicheCoord] = {}
    counts: Dict[NicheCoord, int] = {niche: 0 for niche in matrix.niches}
    for i, niche in enumerate(matrix.niches):
        j = int(np.argmax(matrix.scores[i]))
        partner = matrix.niches[j]
        assignments[niche] = partner
        counts[partner] += 1
    return assignments, counts


def manhattan_profile(matrix: CrossplayMatrix) -> List[tuple]:
    """(distance, mean score, pair count) over unordered pairs, diagonal
    included as distance 0."""
    buckets: Dict[int, list] = {}
    n = len(matrix.niches)
    for i in range(n):
        ci, ri = matrix.niches[i]
        for j in range(i, n):
            cj, rj = matrix.niches[j]
            d = abs(ci - cj) + abs(ri - rj)
            buckets.setdefault(d, []).append(float(matrix.scores[i, j]))
    return [
        (d, math.fsum(vals) / len(vals), len(vals)) for d, vals in sorted(buckets.items())
    ]


def distance_trend(profile: List[tuple]) -> Tuple[float, float]:
    """Spearman rank correlation of bucket-mean score against distance."""
    distances = [row[0] for row in profile]
    means = [row[1] for row in profile]
    rho, pvalue = scipy_stats.spearmanr(distances, means)
    return float(rho), float(pvalue)


# ----------------------------------------------------------------------
# Representation and behavior diversity
# ----------------------------------------------------------------------

def hamming(a: Chromosome, b: Chromosome) -> int:
    """Positions at which two chromosomes differ."""
    if len(a) != len(b):
        raise ValueError("chromosome lengths differ")
    return sum(1 for x, y in zip(a, b) if x != y)


@dataclass
class StateCorpus:
    """Pre-action views recorded from self-play, replayable by any agent."""

    views: List[PlayerView] = field(default_factory=list)
    meta: List[tuple] = field(default_factory=list)  # (niche, game, turn)
    legal_action_counts: List[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.views)

    @property
    def mean_legal_actions(self) -> float:
        if not self.legal_action_counts:
            return 0.0
        return sum(self.legal_action_counts) / len(self.legal_action_counts)

    def save_jsonl(self, path: str) -> None:
        with open(path, "w") as fh:
            header = {
                "format": CORPUS_FORMAT,
                "rule_catalog_hash": catalog_hash(),
                "count": len(self.views),
                "mean_legal_actions": self.mean_legal_actions,
            }
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            for view, (niche, game, turn), legal in zip(
                self.views, self.meta, self.legal_action_counts
            ):
                record = {
                    "n": list(niche),
                    "g": game,
                    "t": turn,
                    "a": legal,
                    "v": view.to_record(),
                }
                fh.write(json.dumps(record, sort_keys=True) + "\n")

    @classmethod
    def load_jsonl(cls, path: str, variant: Variant = STANDARD) -> "StateCorpus":
        corpus = cls()
        with open(path) as fh:
            header = json.loads(fh.readline())
            if header.get("format") != CORPUS_FORMAT:
                raise ValueError(f"not a corpus file: {path}")
            for line in fh:
                record = json.loads(line)
                corpus.views.append(PlayerView.from_record(record["v"], variant))
                corpus.meta.append((tuple(record["n"]), record["g"], record["t"]))
                corpus.legal_action_counts.append(record["a"])
        return corpus


def collect_corpus(
    pool: Sequence[Elite],
    games_each: int,
    master_seed: int,
    variant: Variant = STANDARD,
    progress: Optional[Callable[[int, int], None]] = None,
) -> StateCorpus:
    """Self-play games per elite, recording the acting player's view every
    turn (both seats contribute as they alternate)."""
    corpus = StateCorpus()
    pool = sorted(pool, key=lambda e: e.niche)
    for k, elite in enumerate(pool):
        agent = Agent(elite.genes)
        decide = agent.decide
        for g in range(games_each):
            rng = stream(master_seed, "corpus", elite.niche[0], elite.niche[1], g)
            state = new_game_from(rng, variant)
            step = state.step
            while state.terminal_reason is None:
                view = state.view(state.current_player)
                corpus.views.append(view)
                corpus.meta.append((elite.niche, g, state.turn_count))
                corpus.legal_action_counts.append(view.legal_action_count())
                step(decide(view))
        if progress is not None:
            progress(k + 1, len(pool))
    return corpus


def action_matrix(
    genes_list: Sequence[Chromosome],
    corpus: StateCorpus,
    variant: Variant = STANDARD,
    progress: Optional[Callable[[int, int], None]] = None,
) -> np.ndarray:
    """codes[agent, view] of each agent's action on each corpus view.

    Belief caches live on the views, so the first agent pays for them and
    the rest reuse; rows are cheap after that.
    """
    n_agents = len(genes_list)
    n_views = len(corpus.views)
    codes = np.empty((n_agents, n_views), dtype=np.int16)
    views = corpus.views
    for a, genes in enumerate(genes_list):
        decide = Agent(genes).decide
        row = codes[a]
        for vi in range(n_views):
            row[vi] = action_code(decide(views[vi]), variant)
        if progress is not None:
            progress(a + 1, n_agents)
    return codes


def action_similarity(a: Chromosome, b: Chromosome, corpus: StateCorpus) -> float:
    """Fraction of corpus views on which the two chromosomes take exactly
    the same action."""
    if len(corpus.views) == 0:
        raise ValueError("empty corpus")
    decide_a = Agent(a).decide
    decide_b = Agent(b).decide
    same = 0
    for view in corpus.views:
        if decide_a(view) == decide_b(view):
            same += 1
    return same / len(corpus.views)


def similarity_from_matrix(codes: np.ndarray, i: int, j: int) -> float:
    return float(np.mean(codes[i] == codes[j]))


# ----------------------------------------------------------------------
# Cross-run comparison
# ----------------------------------------------------------------------

def cross_run_report(
    archive_a: Archive,
    archive_b: Archive,
    games: int,
    master_seed: int,
    corpus: Optional[StateCorpus] = None,
    corpus_games: int = 2,
    progress: Optional[Callable[[str, int, int], None]] = None,
) -> dict:
    """Pair corresponding valid elites of two runs: team score over
    `games` seat-balanced games, chromosome Hamming distance, and action
    similarity over a shared corpus (from run A's valid elites unless one
    is supplied). Aggregates compare paired score against both runs'
    self-play means."""
    valid_a = {e.niche: e for e in archive_a.valid_elites()}
    valid_b = {e.niche: e for e in archive_b.valid_elites()}
    common = sorted(set(valid_a) & set(valid_b))
    only_a = sorted(set(valid_a) - set(valid_b))
    only_b = sorted(set(valid_b) - set(valid_a))
    report: dict = {
        "common_niches": [list(n) for n in common],
        "only_in_a": [list(n) for n in only_a],
        "only_in_b": [list(n) for n in only_b],
        "games_per_pair": games,
        "rows": [],
    }
    if not common:
        report["aggregates"] = None
        return report

    if corpus is None:
        corpus = collect_corpus(
            list(valid_a.values()), corpus_games, master_seed,
            progress=None if progress is None
            else (lambda k, n: progress("corpus", k, n)),
        )
    genes_a = [valid_a[n].genes for n in common]
    genes_b = [valid_b[n].genes for n in common]
    codes_a = action_matrix(
        genes_a, corpus,
        progress=None if progress is None else (lambda k, n: progress("codes_a", k, n)),
    )
    codes_b = action_matrix(
        genes_b, corpus,
        progress=None if progress is None else (lambda k, n: progress("codes_b", k, n)),
    )

    paired_scores = []
    hammings = []
    similarities = []
    for idx, niche in enumerate(common):
        ea, eb = valid_a[niche], valid_b[niche]
        rng = stream(master_seed, "pair", niche[0], niche[1])
        scores = play_pair(ea.genes, eb.genes, games, rng)
        paired = math.fsum(scores) / len(scores)
        ham = hamming(ea.genes, eb.genes)
        sim = float(np.mean(codes_a[idx] == codes_b[idx]))
        paired_scores.append(paired)
        hammings.append(ham)
        similarities.append(sim)
        report["rows"].append(
            {
                "niche": list(niche),
                "paired_score": paired,
                "hamming": ham,
                "action_similarity": sim,
                "fitness_a": ea.fitness,
                "fitness_b": eb.fitness,
            }
        )
        if progress is not None:
            progress("pairs", idx + 1, len(common))

    n = len(common)
    mean_self_a = math.fsum(e.fitness for e in valid_a.values()) / len(valid_a)
    mean_self_b = math.fsum(e.fitness for e in valid_b.values()) / len(valid_b)
    report["aggregates"] = {
        "pairs": n,
        "mean_paired_score": math.fsum(paired_scores) / n,
        "mean_hamming": math.fsum(hammings) / n,
        "mean_action_similarity": math.fsum(similarities) / n,
        "mean_selfplay_a": mean_self_a,
        "mean_selfplay_b": mean_self_b,
        "mean_selfplay_both": (mean_self_a + mean_self_b) / 2,
        "mean_selfplay_common_a": math.fsum(valid_a[nc].fitness for nc in common) / n,
        "mean_selfplay_common_b": math.fsum(valid_b[nc].fitness for nc in common) / n,
        "corpus_views": len(corpus.views),
        "corpus_mean_legal_actions": corpus.mean_legal_actions,
    }
    return report
