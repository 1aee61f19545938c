"""NMI of label-propagation communities on inferred graphs across mixing values.

    python scripts/community_sweep.py --seeds 10 --mus 0.1,0.3,0.5 --out community.csv
"""
import argparse
import csv

from netinfer.experiments import run_community


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--mus", default="0.1,0.3,0.5")
    ap.add_argument("--cascades", type=int, default=2000)
    ap.add_argument("--detector-seed", type=int, default=0)
    ap.add_argument("--out", default="community.csv")
    args = ap.parse_args()

    mus = [float(m) for m in args.mus.split(",")]
    res = run_community(range(args.seeds), mus, args.cascades, args.detector_seed)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["algo", "seed", *mus])
        for algo, v in res.items():
            for seed, row in enumerate(v):
                w.writerow([algo, seed, *(f"{x:.6f}" for x in row)])
    print("mu       ", " ".join(f"{m:6.2f}" for m in mus))
    for algo, v in res.items():
        print(f"{algo:9s}", " ".join(f"{x:6.3f}" for x in v.mean(0)))


if __name__ == "__main__":
    main()
