"""CLI: end-to-end subcommands, manifests, determinism, refusals."""

import csv
import json
import pathlib
import subprocess
import sys

import pytest

from hanabi_qd.cli import main

RUN = [sys.executable, "-m", "hanabi_qd.cli"]


def run_cli(*args):
    return main(list(args))


def evolve_args(out, seed=5, individuals=40, init=20, games=3):
    return [
        "evolve", "--seed", str(seed), "--individuals", str(individuals),
        "--init-random", str(init), "--games-per-eval", str(games),
        "--out", str(out),
    ]


@pytest.fixture(scope="module")
def small_archive_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("arch") / "a.json"
    assert run_cli(*evolve_args(path)) == 0
    return path


def test_evolve_writes_archive_and_manifest(small_archive_path):
    assert small_archive_path.exists()
    with open(str(small_archive_path) + ".manifest.json") as fh:
        manifest = json.load(fh)
    assert manifest["command"] == "evolve"
    assert manifest["counters"]["occupied"] >= 1
    assert manifest["flags"]["master_seed"] == 5
    assert str(small_archive_path) in manifest["artifacts"]
    payload = json.loads(small_archive_path.read_text())
    assert payload["format"] == "hanabi-qd-archive-v1"
    assert payload["config"]["total_individuals"] == 40


def test_evolve_rejects_bad_config(tmp_path, capsys):
    rc = run_cli(*evolve_args(tmp_path / "x.json", individuals=10, init=20))
    assert rc == 2
    assert "random_init_count" in capsys.readouterr().err


def test_evolve_byte_identical_serial(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run_cli(*evolve_args(a, seed=9, individuals=25, init=12, games=2)) == 0
    assert run_cli(*evolve_args(b, seed=9, individuals=25, init=12, games=2)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_evolve_differs_across_seeds(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run_cli(*evolve_args(a, seed=1, individuals=25, init=12, games=2)) == 0
    assert run_cli(*evolve_args(b, seed=2, individuals=25, init=12, games=2)) == 0
    assert a.read_bytes() != b.read_bytes()


def test_reevaluate_roundtrip(tmp_path, small_archive_path):
    out = tmp_path / "re.json"
    report = tmp_path / "re.csv"
    rc = run_cli("reevaluate", "--archive", str(small_archive_path),
                 "--games", "5", "--seed", "3", "--out", str(out),
                 "--report", str(report))
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["reevaluation"] == {"games": 5, "master_seed": 3}
    for entry in payload["entries"]:
        assert entry["games_played"] == 5
        assert "fitness_sd" in entry and "fitness_sem" in entry
    with open(report) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(payload["entries"])


def test_catalog_hash_mismatch_refused(tmp_path, small_archive_path, capsys):
    tampered = tmp_path / "bad.json"
    payload = json.loads(small_archive_path.read_text())
    payload["rule_catalog_hash"] = "f" * 64
    tampered.write_text(json.dumps(payload))
    rc = run_cli("export", "--archive", str(tampered), "--out-dir",
                 str(tmp_path / "exp"))
    assert rc == 3
    assert "catalog" in capsys.readouterr().err


def test_export_grids_and_summary(tmp_path, small_archive_path):
    out_dir = tmp_path / "exp"
    rc = run_cli("export", "--archive", str(small_archive_path),
                 "--out-dir", str(out_dir), "--svg")
    assert rc == 0
    with open(out_dir / "fitness_grid.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 21  # header + 20
    assert len(rows[0]) == 21
    payload = json.loads(small_archive_path.read_text())
    occupied = {tuple(e["niche"]) for e in payload["entries"]}
    zero_fitness = {
        tuple(e["niche"]) for e in payload["entries"] if e["fitness"] == 0.0
    }
    # empty niches are blank; zero-fitness niches print 0 (distinct states)
    for ci in range(20):
        for ri in range(20):
            cell = rows[ci + 1][ri + 1]
            if (ci, ri) not in occupied:
                assert cell == ""
            elif (ci, ri) in zero_fitness:
                assert float(cell) == 0.0
    summary = json.loads((out_dir / "summary.json").read_text())
    assert summary["occupied"] == len(occupied)
    assert (out_dir / "fitness_grid.svg").exists()
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert str(small_archive_path) in manifest["inputs"]


def test_crossplay_command(tmp_path, small_archive_path):
    out_dir = tmp_path / "xp"
    rc = run_cli("crossplay", "--archive", str(small_archive_path),
                 "--games-per-pair", "4", "--seed", "2",
                 "--out-dir", str(out_dir), "--max-pool", "6")
    assert rc == 0
    summary = json.loads((out_dir / "summary.json").read_text())
    n = summary["pool_size"]
    assert n <= 6
    assert summary["games_planned"] == n * n * 4
    with open(out_dir / "pairwise_scores.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == n * n
    with open(out_dir / "distance_profile.csv") as fh:
        profile = list(csv.DictReader(fh))
    assert profile[0]["manhattan_distance"] == "0"


def test_similarity_self_is_all_ones(tmp_path, small_archive_path):
    out_dir = tmp_path / "sim"
    rc = run_cli("similarity", "--archive-a", str(small_archive_path),
                 "--archive-b", str(small_archive_path),
                 "--corpus-games", "1", "--seed", "4",
                 "--out-dir", str(out_dir))
    assert rc == 0
    summary = json.loads((out_dir / "summary.json").read_text())
    assert summary["mean_action_similarity"] == 1.0
    with open(out_dir / "similarity_by_niche.csv") as fh:
        for row in csv.DictReader(fh):
            assert float(row["action_similarity"]) == 1.0
            assert row["hamming"] == "0"


def test_cross_run_command(tmp_path, small_archive_path):
    other = tmp_path / "b.json"
    assert run_cli(*evolve_args(other, seed=6, individuals=40, init=20, games=3)) == 0
    out_dir = tmp_path / "xr"
    rc = run_cli("cross-run", "--archive-a", str(small_archive_path),
                 "--archive-b", str(other), "--games", "3",
                 "--corpus-games", "1", "--seed", "5", "--out-dir", str(out_dir))
    assert rc == 0
    report = json.loads((out_dir / "cross_run_report.json").read_text())
    assert "aggregates" in report
    assert (out_dir / "cross_run_niches.csv").exists()


def test_rules_list_csv(tmp_path, capsys):
    rc = run_cli("rules", "list")
    assert rc == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0] == "id,template,params,guard"
    assert len(lines) == 136
    path = tmp_path / "rules.csv"
    assert run_cli("rules", "list", "--out", str(path)) == 0
    assert path.read_text().strip().splitlines()[0] == "id,template,params,guard"


def test_missing_archive_errors(tmp_path, capsys):
    rc = run_cli("export", "--archive", str(tmp_path / "nope.json"),
                 "--out-dir", str(tmp_path / "out"))
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_cli_entrypoint_subprocess(tmp_path):
    out = tmp_path / "sub.json"
    proc = subprocess.run(
        RUN + evolve_args(out, seed=2, individuals=12, init=6, games=2),
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()


def test_crossplay_outputs_byte_identical(tmp_path, small_archive_path):
    dirs = [tmp_path / "x1", tmp_path / "x2"]
    for d in dirs:
        rc = run_cli("crossplay", "--archive", str(small_archive_path),
                     "--games-per-pair", "4", "--seed", "8",
                     "--out-dir", str(d), "--max-pool", "5")
        assert rc == 0
    for name in ("pairwise_scores.csv", "per_agent_mean_grid.csv",
                 "best_partner_counts_grid.csv", "distance_profile.csv",
                 "summary.json"):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()


def test_manifest_lists_existing_artifacts(tmp_path, small_archive_path):
    out_dir = tmp_path / "exp2"
    assert run_cli("export", "--archive", str(small_archive_path),
                   "--out-dir", str(out_dir)) == 0
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["artifacts"]
    for artifact in manifest["artifacts"]:
        assert pathlib.Path(artifact).exists()
    assert manifest["rule_catalog_hash"]
    assert manifest["started_at"] <= manifest["finished_at"]
