"""Command-line front end.

Subcommands: evolve, reevaluate, crossplay, similarity, cross-run,
export, rules list, bench. Every command that writes artifacts also
writes a manifest recording the exact configuration, master seed, rule
catalog hash, input file hashes, and produced files, so any output can be
regenerated from its manifest. Archive files themselves carry no
timestamps: identical flags and seed give byte-identical archives.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from datetime import datetime, timezone

from . import __version__
from .agent import Agent, format_chromosome, parse_chromosome
from .descriptors import GRID, NICHE_WIDTH
from .engine import STANDARD, new_game_from
from .harness import (
    StateCorpus,
    action_matrix,
    best_partners,
    collect_corpus,
    cross_run_report,
    crossplay,
    distance_trend,
    manhattan_profile,
)
from .qd import (
    Archive,
    CatalogMismatchError,
    QdConfig,
    reevaluate_archive,
    run_map_elites,
)
from .rng import stream
from .rules import catalog_csv, catalog_hash

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_CATALOG = 3


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _manifest(command: str, flags: dict, inputs: list, artifacts: list,
              started: str, counters: dict | None = None) -> dict:
    return {
        "command": command,
        "package_version": __version__,
        "rule_catalog_hash": catalog_hash(),
        "flags": flags,
        "inputs": {path: _sha256_file(path) for path in inputs},
        "artifacts": artifacts,
        "counters": counters or {},
        "started_at": started,
        "finished_at": _utcnow(),
    }


def _load_archive(path: str) -> Archive:
    try:
        return Archive.load(path)
    except CatalogMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_CATALOG) from None


def _grid_csv(path: str, values: dict, fmt: str = "{:.6g}") -> None:
    """20x20 grid CSV: rows are communicativeness bins, columns risk bins.
    Missing niches stay empty; a zero value prints as 0 (they differ)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["c\\r"] + [f"{ri * NICHE_WIDTH:.2f}" for ri in range(GRID)]
        writer.writerow(header)
        for ci in range(GRID):
            row = [f"{ci * NICHE_WIDTH:.2f}"]
            for ri in range(GRID):
                value = values.get((ci, ri))
                row.append("" if value is None else fmt.format(value))
            writer.writerow(row)


def _grid_svg(path: str, values: dict, title: str) -> None:
    """Minimal self-contained heatmap; CSV remains the contract."""
    cell = 24
    margin = 40
    size = GRID * cell + 2 * margin
    present = [v for v in values.values() if v is not None]
    vmax = max(present) if present else 1.0
    vmin = min(present) if present else 0.0
    span = (vmax - vmin) or 1.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size + 20}">',
        f'<text x="{margin}" y="20" font-size="14">{title}</text>',
    ]
    for ci in range(GRID):
        for ri in range(GRID):
            x = margin + ri * cell
            y = margin + ci * cell
            value = values.get((ci, ri))
            if value is None:
                fill = "#dddddd"
            else:
                t = (value - vmin) / span
                red = int(255 * t)
                blue = int(255 * (1 - t))
                fill = f"rgb({red},64,{blue})"
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell - 1}" height="{cell - 1}" fill="{fill}"/>'
            )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def _progress_printer(label: str):
    state = {"last": 0.0}

    def report(done, total_or_archive):
        now = time.monotonic()
        if now - state["last"] < 5.0:
            return
        state["last"] = now
        if isinstance(total_or_archive, int):
            print(f"{label}: {done}/{total_or_archive}", file=sys.stderr)
        else:
            archive = total_or_archive
            best = archive.best()
            best_txt = f"{best.fitness:.2f}" if best else "-"
            print(
                f"{label}: {done} individuals, {len(archive)} occupied, best {best_txt}",
                file=sys.stderr,
            )

    return report


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------

def cmd_evolve(args) -> int:
    started = _utcnow()
    config = QdConfig(
        total_individuals=args.individuals,
        random_init_count=args.init_random,
        games_per_eval=args.games_per_eval,
        master_seed=args.seed,
        batch_size=args.batch_size,
    )
    try:
        config.validate()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        # fail before hours of simulation, not after
        with open(args.out, "a"):
            pass
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.threads > 1 and args.batch_size == 1:
        print(
            "note: --threads > 1 does nothing with --batch-size 1; workers "
            "evaluate within a batch",
            file=sys.stderr,
        )
    archive, stats = run_map_elites(
        config,
        threads=args.threads,
        checkpoint_every=args.checkpoint_every,
        checkpoint_path=args.out,
        progress=_progress_printer("evolve"),
    )
    archive.save(args.out, config.to_dict())
    manifest_path = args.out + ".manifest.json"
    _write_json(
        manifest_path,
        _manifest(
            "evolve",
            {**config.to_dict(), "threads": args.threads,
             "checkpoint_every": args.checkpoint_every, "out": args.out},
            [],
            [args.out],
            started,
            counters={**stats.to_dict(), "occupied": len(archive),
                      "coverage": archive.coverage()},
        ),
    )
    best = archive.best()
    print(
        f"evolved {stats.individuals} individuals: {len(archive)} occupied niches, "
        f"coverage {archive.coverage()}, best {best.fitness:.2f} at {best.niche}"
        if best else "evolved: archive empty"
    )
    return EXIT_OK


def cmd_reevaluate(args) -> int:
    started = _utcnow()
    archive = _load_archive(args.archive)
    out = reevaluate_archive(
        archive, args.games, args.seed, threads=args.threads,
        progress=_progress_printer("reevaluate"),
    )
    with open(args.archive) as fh:
        config = json.load(fh).get("config", {})
    out.save(
        args.out, config,
        extra={"reevaluation": {"games": args.games, "master_seed": args.seed}},
    )
    artifacts = [args.out]
    if args.report:
        with open(args.report, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["ci", "ri", "fitness", "sd", "sem", "games"])
            for niche, elite in out.items():
                writer.writerow(
                    [niche[0], niche[1], repr(elite.fitness),
                     repr(elite.fitness_sd), repr(elite.fitness_sem),
                     elite.games_played]
                )
        artifacts.append(args.report)
    _write_json(
        args.out + ".manifest.json",
        _manifest(
            "reevaluate",
            {"archive": args.archive, "games": args.games, "seed": args.seed,
             "out": args.out, "threads": args.threads},
            [args.archive],
            artifacts,
            started,
            counters={"elites": len(out), "coverage": out.coverage(),
                      "mean_fitness_valid": out.mean_fitness()},
        ),
    )
    best = out.best()
    best_txt = f"best {best.fitness:.2f} at {best.niche}" if best else "archive empty"
    print(
        f"reevaluated {len(out)} elites over {args.games} games: coverage "
        f"{out.coverage()}, mean(valid) {out.mean_fitness():.2f}, {best_txt}"
    )
    return EXIT_OK


def _select_pool(archive: Archive, max_pool: int | None):
    pool = archive.valid_elites()
    if max_pool is not None and len(pool) > max_pool:
        # deterministic even spread across the niche-sorted pool
        idx = [round(k * (len(pool) - 1) / (max_pool - 1)) for k in range(max_pool)]
        pool = [pool[i] for i in sorted(set(idx))]
    return pool


def cmd_crossplay(args) -> int:
    started = _utcnow()
    archive = _load_archive(args.archive)
    pool = _select_pool(archive, args.max_pool)
    if not pool:
        print("error: archive has no valid (nonzero-fitness) elites", file=sys.stderr)
        return EXIT_ERROR
    n = len(pool)
    games_planned = n * n * args.games_per_pair
    games_physical = (n * (n + 1) // 2) * args.games_per_pair
    os.makedirs(args.out_dir, exist_ok=True)
    print(
        f"crossplay: {n} elites, {args.games_per_pair} games/pair -> "
        f"{games_planned:,} games planned ({games_physical:,} simulated; "
        f"symmetric cells share games)",
        file=sys.stderr,
    )
    matrix = crossplay(
        pool, args.games_per_pair, args.seed, threads=args.threads,
        progress=_progress_printer("crossplay"),
    )
    pair_path = os.path.join(args.out_dir, "pairwise_scores.csv")
    with open(pair_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ci", "ri", "cj", "rj", "mean_score", "games"])
        for row in matrix.to_rows():
            writer.writerow([row[0], row[1], row[2], row[3], repr(row[4]), row[5]])

    means = matrix.per_agent_means()
    mean_grid = {niche: float(means[i]) for i, niche in enumerate(matrix.niches)}
    mean_grid_path = os.path.join(args.out_dir, "per_agent_mean_grid.csv")
    _grid_csv(mean_grid_path, mean_grid)

    _, counts = best_partners(matrix)
    counts_path = os.path.join(args.out_dir, "best_partner_counts_grid.csv")
    _grid_csv(counts_path, {k: float(v) for k, v in counts.items()}, fmt="{:.0f}")

    profile = manhattan_profile(matrix)
    rho, pvalue = distance_trend(profile)
    profile_path = os.path.join(args.out_dir, "distance_profile.csv")
    with open(profile_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["manhattan_distance", "mean_score", "pairs"])
        for d, mean_score, pairs in profile:
            writer.writerow([d, repr(mean_score), pairs])

    summary = {
        "pool_size": n,
        "games_per_pair": args.games_per_pair,
        "games_planned": games_planned,
        "games_simulated": games_physical,
        "mean_pairwise_excl_diagonal": matrix.mean_pairwise(),
        "mean_pairwise_incl_diagonal": matrix.mean_pairwise(include_diagonal=True),
        "mean_selfplay_diagonal": matrix.mean_selfplay(),
        "mean_selfplay_stored": math.fsum(e.fitness for e in pool) / n,
        "distance_spearman_rho": rho,
        "distance_spearman_p": pvalue,
        "max_occupied_distance": max(row[0] for row in profile),
    }
    summary_path = os.path.join(args.out_dir, "summary.json")
    _write_json(summary_path, summary)
    artifacts = [pair_path, mean_grid_path, counts_path, profile_path, summary_path]
    _write_json(
        os.path.join(args.out_dir, "manifest.json"),
        _manifest(
            "crossplay",
            {"archive": args.archive, "games_per_pair": args.games_per_pair,
             "seed": args.seed, "threads": args.threads, "max_pool": args.max_pool,
             "out_dir": args.out_dir},
            [args.archive],
            artifacts,
            started,
            counters=summary,
        ),
    )
    print(
        f"crossplay done: mean pairwise {summary['mean_pairwise_excl_diagonal']:.2f} "
        f"vs self-play {summary['mean_selfplay_diagonal']:.2f}; "
        f"distance trend rho={rho:.3f} (p={pvalue:.2g})"
    )
    return EXIT_OK


def cmd_similarity(args) -> int:
    started = _utcnow()
    archive_a = _load_archive(args.archive_a)
    archive_b = _load_archive(args.archive_b)
    valid_a = {e.niche: e for e in archive_a.valid_elites()}
    valid_b = {e.niche: e for e in archive_b.valid_elites()}
    common = sorted(set(valid_a) & set(valid_b))
    if not common:
        print("error: archives share no valid niches", file=sys.stderr)
        return EXIT_ERROR
    os.makedirs(args.out_dir, exist_ok=True)
    inputs = [args.archive_a, args.archive_b]
    if args.corpus:
        corpus = StateCorpus.load_jsonl(args.corpus)
        inputs.append(args.corpus)
    else:
        corpus = collect_corpus(list(valid_a.values()), args.corpus_games, args.seed)
    corpus_out = None
    if args.corpus_out:
        corpus.save_jsonl(args.corpus_out)
        corpus_out = args.corpus_out
    import numpy as np

    codes_a = action_matrix([valid_a[niche].genes for niche in common], corpus)
    codes_b = action_matrix([valid_b[niche].genes for niche in common], corpus)
    rows_path = os.path.join(args.out_dir, "similarity_by_niche.csv")
    sims = []
    with open(rows_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ci", "ri", "action_similarity", "hamming"])
        for idx, niche in enumerate(common):
            sim = float(np.mean(codes_a[idx] == codes_b[idx]))
            ham = sum(
                1 for x, y in zip(valid_a[niche].genes, valid_b[niche].genes) if x != y
            )
            sims.append(sim)
            writer.writerow([niche[0], niche[1], repr(sim), ham])
    summary = {
        "pairs": len(common),
        "corpus_views": len(corpus.views),
        "corpus_mean_legal_actions": corpus.mean_legal_actions,
        "mean_action_similarity": math.fsum(sims) / len(sims),
    }
    summary_path = os.path.join(args.out_dir, "summary.json")
    _write_json(summary_path, summary)
    artifacts = [rows_path, summary_path]
    if corpus_out:
        artifacts.append(corpus_out)
    _write_json(
        os.path.join(args.out_dir, "manifest.json"),
        _manifest(
            "similarity",
            {"archive_a": args.archive_a, "archive_b": args.archive_b,
             "corpus": args.corpus, "corpus_games": args.corpus_games,
             "corpus_out": args.corpus_out, "seed": args.seed,
             "out_dir": args.out_dir},
            inputs,
            artifacts,
            started,
            counters=summary,
        ),
    )
    print(
        f"similarity over {summary['corpus_views']} views, {len(common)} pairs: "
        f"mean {summary['mean_action_similarity']:.3f}"
    )
    return EXIT_OK


def cmd_cross_run(args) -> int:
    started = _utcnow()
    archive_a = _load_archive(args.archive_a)
    archive_b = _load_archive(args.archive_b)
    os.makedirs(args.out_dir, exist_ok=True)
    report = cross_run_report(
        archive_a, archive_b, args.games, args.seed, corpus_games=args.corpus_games,
    )
    report_path = os.path.join(args.out_dir, "cross_run_report.json")
    _write_json(report_path, report)
    rows_path = os.path.join(args.out_dir, "cross_run_niches.csv")
    with open(rows_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["ci", "ri", "paired_score", "hamming", "action_similarity",
             "fitness_a", "fitness_b"]
        )
        for row in report["rows"]:
            writer.writerow(
                [row["niche"][0], row["niche"][1], repr(row["paired_score"]),
                 row["hamming"], repr(row["action_similarity"]),
                 repr(row["fitness_a"]), repr(row["fitness_b"])]
            )
    _write_json(
        os.path.join(args.out_dir, "manifest.json"),
        _manifest(
            "cross-run",
            {"archive_a": args.archive_a, "archive_b": args.archive_b,
             "games": args.games, "corpus_games": args.corpus_games,
             "seed": args.seed, "out_dir": args.out_dir},
            [args.archive_a, args.archive_b],
            [report_path, rows_path],
            started,
            counters=report["aggregates"] or {},
        ),
    )
    agg = report["aggregates"]
    if agg:
        print(
            f"cross-run: {agg['pairs']} corresponding pairs, paired score "
            f"{agg['mean_paired_score']:.2f} vs self-play {agg['mean_selfplay_both']:.2f}, "
            f"hamming {agg['mean_hamming']:.2f}, similarity "
            f"{agg['mean_action_similarity']:.3f}"
        )
    else:
        print("cross-run: no common valid niches")
    return EXIT_OK


def cmd_export(args) -> int:
    started = _utcnow()
    archive = _load_archive(args.archive)
    os.makedirs(args.out_dir, exist_ok=True)
    fitness_grid = {niche: elite.fitness for niche, elite in archive.items()}
    grid_path = os.path.join(args.out_dir, "fitness_grid.csv")
    _grid_csv(grid_path, fitness_grid)
    games_grid = {
        niche: float(elite.games_played) for niche, elite in archive.items()
    }
    games_path = os.path.join(args.out_dir, "games_grid.csv")
    _grid_csv(games_path, games_grid, fmt="{:.0f}")
    elites_path = os.path.join(args.out_dir, "elites.csv")
    with open(elites_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["ci", "ri", "fitness", "games_played", "c", "r", "chromosome"]
        )
        for niche, elite in archive.items():
            writer.writerow(
                [niche[0], niche[1], repr(elite.fitness), elite.games_played,
                 repr(elite.descriptor[0]), repr(elite.descriptor[1]),
                 format_chromosome(elite.genes)]
            )
    best = archive.best()
    summary = {
        "occupied": len(archive),
        "coverage": archive.coverage(),
        "mean_fitness_valid": archive.mean_fitness(),
        "mean_fitness_all_400": math.fsum(
            e.fitness for e in archive.elites()
        ) / (GRID * GRID),
        "best_fitness": best.fitness if best else None,
        "best_niche": list(best.niche) if best else None,
        "best_chromosome": format_chromosome(best.genes) if best else None,
    }
    summary_path = os.path.join(args.out_dir, "summary.json")
    _write_json(summary_path, summary)
    artifacts = [grid_path, games_path, elites_path, summary_path]
    if args.svg:
        svg_path = os.path.join(args.out_dir, "fitness_grid.svg")
        _grid_svg(svg_path, fitness_grid, "fitness by niche")
        artifacts.append(svg_path)
    _write_json(
        os.path.join(args.out_dir, "manifest.json"),
        _manifest(
            "export",
            {"archive": args.archive, "out_dir": args.out_dir, "svg": args.svg},
            [args.archive],
            artifacts,
            started,
            counters=summary,
        ),
    )
    print(
        f"exported: occupied {summary['occupied']}, coverage {summary['coverage']}, "
        f"best {summary['best_fitness']}"
    )
    return EXIT_OK


def cmd_rules_list(args) -> int:
    text = catalog_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out} (catalog hash {catalog_hash()[:12]})")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _bench_policy_game(rng, variant=STANDARD):
    state = new_game_from(rng, variant)
    step = state.step
    hands = state.hands
    plays = variant.play_actions
    discards = variant.discard_actions
    hint_ranks = variant.hint_rank_actions
    rank_of = variant.rank_of
    max_info = variant.max_info_tokens
    t = 0
    while state.terminal_reason is None:
        me = state.current_player
        t += 1
        if t % 13 == 0 and hands[me]:
            step(plays[0])
        elif state.info_tokens < max_info and hands[me]:
            step(discards[0])
        else:
            partner = 1 - me
            step(hint_ranks[partner][rank_of[hands[partner][0]] - 1])
    return state.score_val, state.turn_count


def run_engine_benchmark(n_games: int = 6000, seed: int = 42, windows: int = 4) -> dict:
    """Complete scripted games through the public engine API, best window
    of several (noise in a shared box only ever adds time)."""
    import random as _random

    best_rate = 0.0
    turns = 0
    for _ in range(windows):
        rng = _random.Random(seed)
        t0 = time.perf_counter()
        window_turns = 0
        for _ in range(n_games):
            _, tn = _bench_policy_game(rng)
            window_turns += tn
        dt = time.perf_counter() - t0
        best_rate = max(best_rate, n_games / dt)
        turns = window_turns
    return {
        "games_per_second": best_rate,
        "turns_per_game": turns / n_games,
        "turns_per_second": best_rate * (turns / n_games),
        "games_per_window": n_games,
        "windows": windows,
    }


DEFAULT_BENCH_CHROMOSOME = (0, 24, 54, 90, 63, 108, 117) + (117,) * 8


def run_agent_benchmark(n_games: int = 300, seed: int = 7, genes=None) -> dict:
    """Full rule-agent self-play throughput (the evolve workload)."""
    agent = Agent(DEFAULT_BENCH_CHROMOSOME if genes is None else genes)
    rng = stream(seed, "agent-bench")
    t0 = time.perf_counter()
    scores = []
    for _ in range(n_games):
        state = new_game_from(rng)
        step = state.step
        while state.terminal_reason is None:
            step(agent.decide(state.view(state.current_player)))
        scores.append(state.score_val)
    dt = time.perf_counter() - t0
    return {
        "games_per_second": n_games / dt,
        "mean_score": math.fsum(scores) / n_games,
        "games": n_games,
    }


def cmd_bench(args) -> int:
    engine = run_engine_benchmark(n_games=args.games, seed=args.seed)
    print(
        f"engine: {engine['games_per_second']:,.0f} games/s "
        f"({engine['turns_per_second']:,.0f} turns/s, "
        f"{engine['turns_per_game']:.1f} turns/game)"
    )
    if args.agent_games:
        genes = parse_chromosome(args.chromosome) if args.chromosome else None
        agent = run_agent_benchmark(n_games=args.agent_games, seed=args.seed,
                                    genes=genes)
        print(
            f"agent self-play: {agent['games_per_second']:,.0f} games/s "
            f"(mean score {agent['mean_score']:.2f})"
        )
    return EXIT_OK


# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hanabi-qd",
        description="Quality-diversity pool generation and evaluation for "
                    "rule-based Hanabi agents",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run MAP-Elites and write an archive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--individuals", type=int, default=1_000_000)
    p.add_argument("--init-random", type=int, default=10_000)
    p.add_argument("--games-per-eval", type=int, default=100)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--batch-size", type=int, default=1)
    p.add_argument("--checkpoint-every", type=int, default=10_000)
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("reevaluate", help="re-measure every elite's fitness")
    p.add_argument("--archive", required=True)
    p.add_argument("--games", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None, help="optional per-elite CSV")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(fn=cmd_reevaluate)

    p = sub.add_parser("crossplay", help="pairwise performance of valid elites")
    p.add_argument("--archive", required=True)
    p.add_argument("--games-per-pair", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--max-pool", type=int, default=None,
                   help="evenly subsample the valid pool to at most this many")
    p.set_defaults(fn=cmd_crossplay)

    p = sub.add_parser("similarity", help="action similarity between two archives")
    p.add_argument("--archive-a", required=True)
    p.add_argument("--archive-b", required=True)
    p.add_argument("--corpus", default=None, help="reuse a saved corpus JSONL")
    p.add_argument("--corpus-games", type=int, default=2)
    p.add_argument("--corpus-out", default=None,
                   help="also write the corpus used, as JSONL")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_similarity)

    p = sub.add_parser("cross-run", help="corresponding-elite comparison of two runs")
    p.add_argument("--archive-a", required=True)
    p.add_argument("--archive-b", required=True)
    p.add_argument("--games", type=int, default=1000)
    p.add_argument("--corpus-games", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_cross_run)

    p = sub.add_parser("export", help="grid CSVs and summary for an archive")
    p.add_argument("--archive", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("rules", help="rule catalog utilities")
    rules_sub = p.add_subparsers(dest="rules_command", required=True)
    pl = rules_sub.add_parser("list", help="dump the catalog as CSV")
    pl.add_argument("--out", default=None)
    pl.set_defaults(fn=cmd_rules_list)

    p = sub.add_parser("bench", help="engine throughput benchmark")
    p.add_argument("--games", type=int, default=6000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--agent-games", type=int, default=0,
                   help="also benchmark full-agent self-play with this many games")
    p.add_argument("--chromosome", default=None,
                   help="agent to benchmark, as 15 comma-separated rule ids")
    p.set_defaults(fn=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
