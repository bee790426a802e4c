"""Harness analyses: cross-play, partners, distances, similarity, cross-run."""

import json

import numpy as np
import pytest

from hanabi_qd.engine import STANDARD
from hanabi_qd.harness import (
    StateCorpus,
    action_code,
    action_matrix,
    action_similarity,
    best_partners,
    collect_corpus,
    cross_run_report,
    crossplay,
    distance_trend,
    hamming,
    manhattan_profile,
    play_pair,
)
from hanabi_qd.qd import Archive, Elite, QdConfig, run_map_elites
from hanabi_qd.rng import stream

GOOD = (0, 24, 54, 90, 63, 108, 117) + (117,) * 8
OK = (0, 54, 99, 117) + (117,) * 11
MEH = (9, 81, 117) + (117,) * 12


def elite(niche, genes, fitness=8.0):
    return Elite(
        genes=genes, fitness=fitness, games_played=30,
        descriptor=(niche[0] * 0.05 + 0.02, niche[1] * 0.05 + 0.02),
        niche=niche, lineage_seed=0,
    )


POOL = [
    elite((12, 18), GOOD, 17.0),
    elite((8, 14), OK, 10.0),
    elite((4, 9), MEH, 6.0),
]


def small_archive(seed, individuals=50, init=25, games=4):
    cfg = QdConfig(total_individuals=individuals, random_init_count=init,
                   games_per_eval=games, master_seed=seed)
    archive, _ = run_map_elites(cfg)
    return archive


def test_action_codes_distinct():
    v = STANDARD
    codes = set()
    for a in v.play_actions:
        codes.add(action_code(a, v))
    for a in v.discard_actions:
        codes.add(action_code(a, v))
    for a in v.hint_color_actions[1]:
        codes.add(action_code(a, v))
    for a in v.hint_rank_actions[1]:
        codes.add(action_code(a, v))
    assert len(codes) == 5 + 5 + 5 + 5


def test_hamming_basics():
    assert hamming(GOOD, GOOD) == 0
    other = list(GOOD)
    other[3] = (other[3] + 1) % 135
    assert hamming(GOOD, tuple(other)) == 1
    with pytest.raises(ValueError):
        hamming(GOOD, GOOD[:-1])


def test_play_pair_seat_balanced_deterministic():
    rng1 = stream(5, "pp")
    rng2 = stream(5, "pp")
    s1 = play_pair(GOOD, OK, 6, rng1)
    s2 = play_pair(GOOD, OK, 6, rng2)
    assert s1 == s2
    assert len(s1) == 6


def test_crossplay_matrix_shape_and_symmetry():
    matrix = crossplay(POOL, games_per_pair=6, master_seed=3)
    assert matrix.scores.shape == (3, 3)
    assert np.array_equal(matrix.scores, matrix.scores.T)
    assert np.all(matrix.games == 6)
    assert matrix.niches == ((4, 9), (8, 14), (12, 18))  # niche-sorted


def test_crossplay_diagonal_matches_selfplay_evaluation():
    matrix = crossplay(POOL[:1], games_per_pair=10, master_seed=3)
    # diagonal games use the same per-niche stream regardless of pool makeup
    again = crossplay(POOL, games_per_pair=10, master_seed=3)
    i = again.index_of(POOL[0].niche)
    assert matrix.scores[0, 0] == again.scores[i, i]


def test_crossplay_subset_invariance():
    # dropping an elite never changes surviving pairs' cells
    full = crossplay(POOL, games_per_pair=4, master_seed=9)
    sub = crossplay(POOL[1:], games_per_pair=4, master_seed=9)
    for a in range(len(sub.niches)):
        for b in range(len(sub.niches)):
            fa = full.index_of(sub.niches[a])
            fb = full.index_of(sub.niches[b])
            assert sub.scores[a, b] == full.scores[fa, fb]


def test_best_partners_counts_sum_to_pool():
    matrix = crossplay(POOL, games_per_pair=6, master_seed=1)
    assignments, counts = best_partners(matrix)
    assert len(assignments) == 3
    assert sum(counts.values()) == 3
    assert set(assignments) == set(matrix.niches)


def test_best_partners_single_agent_is_itself():
    matrix = crossplay(POOL[:1], games_per_pair=4, master_seed=1)
    assignments, counts = best_partners(matrix)
    only = POOL[0].niche
    assert assignments == {only: only}
    assert counts == {only: 1}


def test_manhattan_profile_distance_zero_is_selfplay_mean():
    matrix = crossplay(POOL, games_per_pair=6, master_seed=2)
    profile = manhattan_profile(matrix)
    by_distance = {row[0]: row for row in profile}
    assert by_distance[0][1] == pytest.approx(matrix.mean_selfplay())
    assert by_distance[0][2] == 3
    total_pairs = sum(row[2] for row in profile)
    assert total_pairs == 3 + 3  # diagonal + unordered off-diagonal


def test_distance_trend_runs():
    profile = [(0, 10.0, 3), (5, 8.0, 2), (9, 6.0, 2), (14, 4.0, 1)]
    rho, p = distance_trend(profile)
    assert rho == -1.0
    assert p < 0.2


def test_corpus_collection_and_roundtrip(tmp_path):
    corpus = collect_corpus(POOL, games_each=2, master_seed=7)
    assert len(corpus) > 200
    assert 5 <= corpus.mean_legal_actions <= 20
    path = tmp_path / "corpus.jsonl"
    corpus.save_jsonl(str(path))
    loaded = StateCorpus.load_jsonl(str(path))
    assert len(loaded) == len(corpus)
    assert loaded.meta == corpus.meta
    assert loaded.mean_legal_actions == pytest.approx(corpus.mean_legal_actions)
    # replayed views serialize identically
    for a, b in zip(corpus.views[:50], loaded.views[:50]):
        assert a.canonical_key() == b.canonical_key()


def test_corpus_views_reproducible():
    c1 = collect_corpus(POOL[:2], games_each=1, master_seed=11)
    c2 = collect_corpus(POOL[:2], games_each=1, master_seed=11)
    assert [v.canonical_key() for v in c1.views] == \
        [v.canonical_key() for v in c2.views]


def test_action_similarity_reflexive_and_symmetric():
    corpus = collect_corpus(POOL[:2], games_each=1, master_seed=13)
    assert action_similarity(GOOD, GOOD, corpus) == 1.0
    ab = action_similarity(GOOD, OK, corpus)
    ba = action_similarity(OK, GOOD, corpus)
    assert ab == ba
    assert 0.0 <= ab <= 1.0


def test_action_similarity_empty_corpus_raises():
    with pytest.raises(ValueError):
        action_similarity(GOOD, OK, StateCorpus())


def test_action_matrix_agrees_with_action_similarity():
    corpus = collect_corpus(POOL[:2], games_each=1, master_seed=17)
    codes = action_matrix([GOOD, OK, MEH], corpus)
    assert codes.shape == (3, len(corpus))
    direct = action_similarity(GOOD, OK, corpus)
    from hanabi_qd.harness import similarity_from_matrix

    assert similarity_from_matrix(codes, 0, 1) == pytest.approx(direct)


def test_cross_run_report_self_comparison():
    archive = small_archive(2, individuals=40, init=20, games=3)
    report = cross_run_report(archive, archive, games=4, master_seed=5,
                              corpus_games=1)
    agg = report["aggregates"]
    assert agg is not None
    assert agg["mean_hamming"] == 0.0
    assert agg["mean_action_similarity"] == 1.0
    assert report["only_in_a"] == [] and report["only_in_b"] == []
    # paired score equals self-play within noise; exact check is determinism
    report2 = cross_run_report(archive, archive, games=4, master_seed=5,
                               corpus_games=1)
    assert json.dumps(report, sort_keys=True) == json.dumps(report2, sort_keys=True)


def test_cross_run_report_disjoint_coverage():
    a = Archive()
    a.cells[(1, 1)] = elite((1, 1), GOOD, 5.0)
    b = Archive()
    b.cells[(2, 2)] = elite((2, 2), OK, 5.0)
    report = cross_run_report(a, b, games=2, master_seed=1, corpus_games=1)
    assert report["aggregates"] is None
    assert report["common_niches"] == []
    assert report["only_in_a"] == [[1, 1]]
    assert report["only_in_b"] == [[2, 2]]


def test_cross_run_report_two_small_runs():
    a = small_archive(10, individuals=40, init=20, games=3)
    b = small_archive(20, individuals=40, init=20, games=3)
    report = cross_run_report(a, b, games=3, master_seed=9, corpus_games=1)
    if report["aggregates"] is not None:
        assert report["aggregates"]["mean_hamming"] > 0
        assert 0 <= report["aggregates"]["mean_action_similarity"] < 1.0


def test_crossplay_threads_match_serial():
    pooled = crossplay(POOL, games_per_pair=4, master_seed=5, threads=2)
    serial = crossplay(POOL, games_per_pair=4, master_seed=5, threads=1)
    assert np.array_equal(pooled.scores, serial.scores)
    assert np.array_equal(pooled.games, serial.games)
