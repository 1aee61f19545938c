"""F-measure against cascade count for DANI and the time-adjacency baseline.

    python scripts/trend_sweep.py --seeds 10 --counts 250,500,1000,2000 --out trend.csv
"""
import argparse
import csv

import numpy as np

from netinfer.experiments import run_trend


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--counts", default="250,500,1000,2000")
    ap.add_argument("--mu", type=float, default=0.1)
    ap.add_argument("--out", default="trend.csv")
    args = ap.parse_args()

    counts = [int(c) for c in args.counts.split(",")]
    res = run_trend(range(args.seeds), counts, args.mu)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["algo", "seed", *counts])
        for algo, f in res.items():
            for seed, row in enumerate(f):
                w.writerow([algo, seed, *(f"{x:.6f}" for x in row)])
    for algo, f in res.items():
        print(f"{algo:9s}", " ".join(f"{x:.3f}" for x in f.mean(0)))
    print("margin at", counts[-1], f"{np.mean(res['dani'][:, -1] - res['baseline'][:, -1]):.3f}")


if __name__ == "__main__":
    main()
