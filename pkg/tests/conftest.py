"""Shared fixtures, including the desk-scale experiment artifacts.

The desk-scale runs back acceptance criteria 5-8. They are expensive
(hours of single-core simulation), so they live under runs/ and are
reused across sessions; the fixture regenerates anything missing via the
CLI so a fresh checkout remains self-contained, just slow the first time.
"""

import json
import os
import subprocess
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
RUNS = os.path.join(ROOT, "runs")

DESK = {
    "a": {"seed": 20250809, "individuals": 100_000, "init": 10_000, "games": 30},
    "b": {"seed": 1337, "individuals": 50_000, "init": 10_000, "games": 30},
    "reeval_games": 1000,
    "reeval_seed_a": 424242,
    "reeval_seed_b": 434343,
    "crossplay": {"games_per_pair": 100, "seed": 515151, "max_pool": 128},
    "crossrun": {"games": 200, "corpus_games": 2, "seed": 616161},
}


def _cli(*args):
    cmd = [sys.executable, "-m", "hanabi_qd.cli", *[str(a) for a in args]]
    print(f"\n[desk artifacts] {' '.join(cmd)}", file=sys.stderr)
    subprocess.run(cmd, check=True, cwd=ROOT)


def _ensure_archive(name: str, spec: dict) -> str:
    path = os.path.join(RUNS, f"desk_{name}.json")
    if not os.path.exists(path):
        os.makedirs(RUNS, exist_ok=True)
        _cli(
            "evolve", "--seed", spec["seed"], "--individuals", spec["individuals"],
            "--init-random", spec["init"], "--games-per-eval", spec["games"],
            "--out", path, "--checkpoint-every", 2000,
        )
    with open(path) as fh:
        config = json.load(fh)["config"]
    assert config["master_seed"] == spec["seed"], "desk archive config drift"
    assert config["total_individuals"] == spec["individuals"]
    return path


def _ensure_reeval(name: str, seed: int) -> str:
    src = os.path.join(RUNS, f"desk_{name}.json")
    path = os.path.join(RUNS, f"desk_{name}_reeval.json")
    if not os.path.exists(path):
        _cli(
            "reevaluate", "--archive", src, "--games", DESK["reeval_games"],
            "--seed", seed, "--out", path,
            "--report", os.path.join(RUNS, f"desk_{name}_reeval.csv"),
        )
    return path


def _ensure_crossplay() -> str:
    out_dir = os.path.join(RUNS, "desk_a_crossplay")
    if not os.path.exists(os.path.join(out_dir, "summary.json")):
        spec = DESK["crossplay"]
        _cli(
            "crossplay", "--archive", os.path.join(RUNS, "desk_a_reeval.json"),
            "--games-per-pair", spec["games_per_pair"], "--seed", spec["seed"],
            "--out-dir", out_dir, "--max-pool", spec["max_pool"],
        )
    return out_dir


def _ensure_crossrun() -> str:
    out_dir = os.path.join(RUNS, "crossrun_ab")
    if not os.path.exists(os.path.join(out_dir, "cross_run_report.json")):
        spec = DESK["crossrun"]
        _cli(
            "cross-run",
            "--archive-a", os.path.join(RUNS, "desk_a_reeval.json"),
            "--archive-b", os.path.join(RUNS, "desk_b_reeval.json"),
            "--games", spec["games"], "--corpus-games", spec["corpus_games"],
            "--seed", spec["seed"], "--out-dir", out_dir,
        )
    return out_dir


@pytest.fixture(scope="session")
def desk_artifacts():
    """Paths to the desk-scale archives and analyses, generating on demand."""
    paths = {
        "a": _ensure_archive("a", DESK["a"]),
        "b": _ensure_archive("b", DESK["b"]),
    }
    paths["a_reeval"] = _ensure_reeval("a", DESK["reeval_seed_a"])
    paths["b_reeval"] = _ensure_reeval("b", DESK["reeval_seed_b"])
    paths["crossplay_dir"] = _ensure_crossplay()
    paths["crossrun_dir"] = _ensure_crossrun()
    return paths
