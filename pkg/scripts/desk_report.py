"""Print a one-screen summary of the desk-scale artifacts under runs/."""

import json
import os
import sys

from hanabi_qd.qd import Archive

RUNS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "runs")


def show(path):
    archive = Archive.load(path)
    best = archive.best()
    print(f"{os.path.basename(path)}: occupied {len(archive)}, coverage "
          f"{archive.coverage()}, mean(valid) {archive.mean_fitness():.2f}, "
          f"best {best.fitness:.2f} at {best.niche} "
          f"(c={best.descriptor[0]:.3f}, r={best.descriptor[1]:.3f})")
    tops = sorted(archive.elites(), key=lambda e: -e.fitness)[:6]
    for e in tops:
        sd = f" sd={e.fitness_sd:.2f}" if e.fitness_sd is not None else ""
        print(f"    {e.niche} fit={e.fitness:5.2f}{sd} c={e.descriptor[0]:.3f} r={e.descriptor[1]:.3f}")


def main():
    for name in ("desk_a.json", "desk_a_reeval.json", "desk_b.json", "desk_b_reeval.json"):
        path = os.path.join(RUNS, name)
        if os.path.exists(path):
            show(path)
        else:
            print(f"{name}: missing")
    for sub, fname in (("desk_a_crossplay", "summary.json"),
                       ("crossrun_ab", "cross_run_report.json")):
        path = os.path.join(RUNS, sub, fname)
        if os.path.exists(path):
            with open(path) as fh:
                data = json.load(fh)
            if "aggregates" in data:
                print(f"{sub}: {json.dumps(data['aggregates'], indent=1)[:400]}")
            else:
                keys = ("pool_size", "mean_selfplay_diagonal",
                        "mean_pairwise_excl_diagonal", "distance_spearman_rho",
                        "distance_spearman_p", "max_occupied_distance")
                print(f"{sub}: " + ", ".join(f"{k}={data[k]}" for k in keys if k in data))
        else:
            print(f"{sub}/{fname}: missing")


if __name__ == "__main__":
    main()
