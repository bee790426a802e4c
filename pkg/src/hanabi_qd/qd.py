"""MAP-Elites over the communicativeness x risk-aversion grid.

The loop: seed the archive with random chromosomes, then repeatedly pick
a random occupied niche, breed its elite against the elite of another
random occupied niche, evaluate the child in self-play, and map it to its
niche. A contested niche re-evaluates the incumbent with fresh games
before comparing, so stale lucky fitnesses do not entrench; the winner's
stored fitness is always its latest measurement, and ties keep the
incumbent.

Randomness is fanned out per purpose and per individual index ("genes",
"eval", "reeval" streams), so a run is reproducible given its master seed
and batch size regardless of worker count. batch_size=1 with threads=1 is
the serial reference schedule; larger batches evaluate against an archive
snapshot, a different but equally valid schedule.
"""

from __future__ import annotations

import json
import math
import os
import random
import statistics
import tempfile
from dataclasses import dataclass
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

from .agent import Agent, make_offspring, random_chromosome
from .descriptors import (
    BehaviorDescriptor,
    BehaviorStats,
    NicheCoord,
    accumulate,
    finalize,
    niche_of,
)
from .engine import STANDARD, Variant, new_game_from
from .rng import stream
from .rules import catalog_hash

ARCHIVE_FORMAT = "hanabi-qd-archive-v1"


class CatalogMismatchError(RuntimeError):
    """Archive was produced under a different rule catalog."""


@dataclass(frozen=True)
class QdConfig:
    total_individuals: int = 1_000_000
    random_init_count: int = 10_000
    games_per_eval: int = 100
    master_seed: int = 0
    batch_size: int = 1
    # noise-free mode: every evaluation replays this one frozen seed set,
    # so fitness comparisons are exact and per-niche fitness never drops
    frozen_eval_seed: Optional[int] = None

    def validate(self) -> "QdConfig":
        if self.total_individuals < 1:
            raise ValueError("total_individuals must be >= 1")
        if self.random_init_count > self.total_individuals:
            raise ValueError("random_init_count must be <= total_individuals")
        if self.random_init_count < 1:
            raise ValueError("random_init_count must be >= 1")
        if self.games_per_eval < 1:
            raise ValueError("games_per_eval must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        return self

    def to_dict(self) -> dict:
        out = {
            "total_individuals": self.total_individuals,
            "random_init_count": self.random_init_count,
            "games_per_eval": self.games_per_eval,
            "master_seed": self.master_seed,
            "batch_size": self.batch_size,
        }
        if self.frozen_eval_seed is not None:
            out["frozen_eval_seed"] = self.frozen_eval_seed
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "QdConfig":
        return cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})


@dataclass
class Elite:
    genes: Tuple[int, ...]
    fitness: float
    games_played: int
    descriptor: Tuple[float, float]
    niche: NicheCoord
    lineage_seed: int
    fitness_sd: Optional[float] = None
    fitness_sem: Optional[float] = None


class EvalResult(NamedTuple):
    fitness: float
    descriptor: Optional[BehaviorDescriptor]
    scores: List[int]


def evaluate(
    genes,
    n_games: int,
    rng: random.Random,
    collect_stats: bool = True,
    variant: Variant = STANDARD,
) -> EvalResult:
    """Self-play evaluation: both seats run the chromosome, fitness is the
    mean final score, behavior pools over both seats and all games."""
    agent = Agent(genes)
    decide = agent.decide
    stats = BehaviorStats() if collect_stats else None
    scores = []
    for _ in range(n_games):
        state = new_game_from(rng, variant)
        step = state.step
        if stats is None:
            while state.terminal_reason is None:
                step(decide(state.view(state.current_player)))
        else:
            while state.terminal_reason is None:
                view = state.view(state.current_player)
                action = decide(view)
                accumulate(stats, view, action)
                step(action)
        scores.append(state.score_val)
    fitness = math.fsum(scores) / n_games
    descriptor = finalize(stats) if stats is not None else None
    return EvalResult(fitness, descriptor, scores)


# ----------------------------------------------------------------------
# Archive
# ----------------------------------------------------------------------

class Archive:
    """Best individual per occupied niche; at most GRID*GRID entries."""

    def __init__(self):
        self.cells: Dict[NicheCoord, Elite] = {}

    def __len__(self) -> int:
        return len(self.cells)

    def get(self, niche: NicheCoord) -> Optional[Elite]:
        return self.cells.get(niche)

    def items(self) -> List[Tuple[NicheCoord, Elite]]:
        return sorted(self.cells.items())

    def elites(self) -> List[Elite]:
        return [elite for _, elite in self.items()]

    def valid_elites(self) -> List[Elite]:
        """Elites with nonzero fitness: the pool the analyses run on."""
        return [elite for _, elite in self.items() if elite.fitness > 0]

    def coverage(self) -> int:
        """Number of niches holding an elite that scores above zero."""
        return len(self.valid_elites())

    def occupied(self) -> List[NicheCoord]:
        return sorted(self.cells)

    def best(self) -> Optional[Elite]:
        if not self.cells:
            return None
        return max(self.elites(), key=lambda e: (e.fitness, e.niche))

    def mean_fitness(self, valid_only: bool = True) -> float:
        pool = self.valid_elites() if valid_only else self.elites()
        if not pool:
            return 0.0
        return math.fsum(e.fitness for e in pool) / len(pool)

    # ------------------------------------------------------------------
    def to_payload(self, config: Optional[dict] = None, extra: Optional[dict] = None) -> dict:
        entries = []
        for niche, elite in self.items():
            entry = {
                "niche": list(niche),
                "genes": list(elite.genes),
                "fitness": elite.fitness,
                "games_played": elite.games_played,
                "descriptor": list(elite.descriptor),
                "lineage_seed": elite.lineage_seed,
            }
            if elite.fitness_sd is not None:
                entry["fitness_sd"] = elite.fitness_sd
                entry["fitness_sem"] = elite.fitness_sem
            entries.append(entry)
        payload = {
            "format": ARCHIVE_FORMAT,
            "rule_catalog_hash": catalog_hash(),
            "config": config or {},
            "entries": entries,
        }
        if extra:
            payload.update(extra)
        return payload

    def save(self, path: str, config: Optional[dict] = None, extra: Optional[dict] = None) -> None:
        """Atomic-replace write so checkpoints never leave a torn file."""
        payload = self.to_payload(config, extra)
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def from_payload(cls, payload: dict, check_catalog: bool = True) -> "Archive":
        if check_catalog and payload.get("rule_catalog_hash") != catalog_hash():
            raise CatalogMismatchError(
                "archive rule_catalog_hash does not match this build's catalog; "
                "refusing to interpret gene indices against a different rule set"
            )
        archive = cls()
        for entry in payload["entries"]:
            niche = tuple(entry["niche"])
            elite = Elite(
                genes=tuple(entry["genes"]),
                fitness=entry["fitness"],
                games_played=entry["games_played"],
                descriptor=tuple(entry["descriptor"]),
                niche=niche,
                lineage_seed=entry.get("lineage_seed", -1),
                fitness_sd=entry.get("fitness_sd"),
                fitness_sem=entry.get("fitness_sem"),
            )
            archive.cells[niche] = elite
        return archive

    @classmethod
    def load(cls, path: str, check_catalog: bool = True) -> "Archive":
        with open(path) as fh:
            payload = json.load(fh)
        return cls.from_payload(payload, check_catalog=check_catalog)


# ----------------------------------------------------------------------
# Insertion
# ----------------------------------------------------------------------

def try_insert(
    archive: Archive,
    candidate: Elite,
    games: int,
    rng: random.Random,
    evaluator: Callable = evaluate,
) -> Tuple[bool, bool]:
    """Insert into an empty niche, or contest the incumbent after
    re-measuring it with fresh games. Returns (candidate won, contested).
    The surviving elite's stored fitness is its latest measurement."""
    incumbent = archive.cells.get(candidate.niche)
    if incumbent is None:
        archive.cells[candidate.niche] = candidate
        return True, False
    redo = evaluator(incumbent.genes, games, rng, collect_stats=False)
    if candidate.fitness > redo.fitness:
        archive.cells[candidate.niche] = candidate
        return True, True
    incumbent.fitness = redo.fitness
    incumbent.games_played = games
    return False, True


@dataclass
class RunStats:
    individuals: int = 0
    un_nicheable: int = 0
    inserts_into_empty: int = 0
    contests: int = 0
    contest_wins: int = 0
    games_simulated: int = 0
    checkpoints: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


# ----------------------------------------------------------------------
# The main loop
# ----------------------------------------------------------------------

def _eval_job(args):
    genes, master_seed, index, n_games, frozen = args
    if frozen is None:
        rng = stream(master_seed, "eval", index)
    else:
        rng = stream(frozen, "frozen-eval")
    res = evaluate(genes, n_games, rng)
    desc = res.descriptor
    return index, res.fitness, (None if desc is None else (desc.c, desc.r))


def run_map_elites(
    config: QdConfig,
    threads: int = 1,
    checkpoint_every: int = 10_000,
    checkpoint_path: Optional[str] = None,
    progress: Optional[Callable[[int, Archive], None]] = None,
) -> Tuple[Archive, RunStats]:
    """Run the full loop: random init phase, then steady-state offspring.

    Offspring for index i are bred from the elite of a uniformly random
    occupied niche crossed (with probability 0.5) against the elite of a
    different random occupied niche, then mutated; all randomness for
    individual i comes from streams keyed by i. Incumbent re-evaluations
    run in the parent process; with threads > 1 candidate evaluations are
    farmed to a worker pool in batches of config.batch_size.
    """
    config.validate()
    seed = config.master_seed
    games = config.games_per_eval
    archive = Archive()
    stats = RunStats()
    select_rng = stream(seed, "select")
    pool = None
    if threads > 1:
        import multiprocessing as mp
        from concurrent.futures import ProcessPoolExecutor

        pool = ProcessPoolExecutor(
            max_workers=threads, mp_context=mp.get_context("fork")
        )
    try:
        next_checkpoint = checkpoint_every
        index = 0
        total = config.total_individuals
        init = config.random_init_count
        while index < total:
            batch_end = min(index + config.batch_size, total)
            if index < init:
                batch_end = min(batch_end, init)
            payloads = []
            occupied = archive.occupied()
            for i in range(index, batch_end):
                gene_rng = stream(seed, "genes", i)
                if i < init:
                    genes = random_chromosome(gene_rng)
                elif occupied:
                    a = select_rng.randrange(len(occupied))
                    if len(occupied) > 1:
                        m = select_rng.randrange(len(occupied) - 1)
                        if m >= a:
                            m += 1
                    else:
                        m = a
                    elite = archive.cells[occupied[a]]
                    mate = archive.cells[occupied[m]]
                    genes = make_offspring(elite.genes, mate.genes, gene_rng)
                else:
                    # degenerate: nothing nicheable during init, keep sampling
                    genes = random_chromosome(gene_rng)
                payloads.append((genes, seed, i, games, config.frozen_eval_seed))
            if pool is not None and len(payloads) > 1:
                results = list(pool.map(_eval_job, payloads, chunksize=4))
            else:
                results = [_eval_job(p) for p in payloads]
            for (genes, _, i, _, _), (ridx, fitness, desc) in zip(payloads, results):
                assert ridx == i
                stats.individuals += 1
                stats.games_simulated += games
                if desc is None:
                    stats.un_nicheable += 1
                    continue
                descriptor = BehaviorDescriptor(*desc)
                candidate = Elite(
                    genes=genes,
                    fitness=fitness,
                    games_played=games,
                    descriptor=desc,
                    niche=niche_of(descriptor),
                    lineage_seed=i,
                )
                if config.frozen_eval_seed is None:
                    reeval_rng = stream(seed, "reeval", i)
                else:
                    reeval_rng = stream(config.frozen_eval_seed, "frozen-eval")
                won, contested = try_insert(archive, candidate, games, reeval_rng)
                if contested:
                    stats.contests += 1
                    stats.games_simulated += games
                    if won:
                        stats.contest_wins += 1
                else:
                    stats.inserts_into_empty += 1
            index = batch_end
            if checkpoint_path and index >= next_checkpoint:
                archive.save(checkpoint_path, config.to_dict())
                stats.checkpoints += 1
                next_checkpoint += checkpoint_every
            if progress is not None:
                progress(index, archive)
    finally:
        if pool is not None:
            pool.shutdown()
    return archive, stats


# ----------------------------------------------------------------------
# Final re-evaluation
# ----------------------------------------------------------------------

def _reeval_job(args):
    genes, master_seed, niche, n_games = args
    res = evaluate(
        genes, n_games, stream(master_seed, "final", niche[0], niche[1]),
        collect_stats=False,
    )
    sd = statistics.stdev(res.scores) if n_games > 1 else 0.0
    return niche, res.fitness, sd


def reevaluate_archive(
    archive: Archive,
    n_games: int,
    master_seed: int,
    threads: int = 1,
    progress: Optional[Callable[[int, int], None]] = None,
) -> Archive:
    """Fresh fitness for every elite over n_games; chromosomes, descriptors
    and niche keys unchanged. Stores per-elite score sd and standard error."""
    if n_games < 1:
        raise ValueError("n_games must be >= 1")
    jobs = [
        (elite.genes, master_seed, niche, n_games) for niche, elite in archive.items()
    ]
    if threads > 1:
        import multiprocessing as mp
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(
            max_workers=threads, mp_context=mp.get_context("fork")
        ) as pool:
            results = list(pool.map(_reeval_job, jobs, chunksize=1))
    else:
        results = []
        for k, job in enumerate(jobs):
            results.append(_reeval_job(job))
            if progress is not None:
                progress(k + 1, len(jobs))
    out = Archive()
    for (niche, elite), (rniche, fitness, sd) in zip(archive.items(), results):
        assert rniche == niche
        out.cells[niche] = Elite(
            genes=elite.genes,
            fitness=fitness,
            games_played=n_games,
            descriptor=elite.descriptor,
            niche=niche,
            lineage_seed=elite.lineage_seed,
            fitness_sd=sd,
            fitness_sem=sd / math.sqrt(n_games),
        )
    return out
