"""Timing of simulation and inference on the 1000-node, 7692-edge graph."""
import argparse
import time

from netinfer.evaluation import edge_metrics
from netinfer.experiments import desk_graph
from netinfer.inference import infer
from netinfer.simulate import SimConfig, simulate_batch


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--counts", default="500,1000,2000,5000,10000,20000")
    ap.add_argument("--prob", type=float, default=0.05)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    counts = [int(c) for c in args.counts.split(",")]
    g, _ = desk_graph()
    t0 = time.perf_counter()
    sets = simulate_batch(g, SimConfig(cascade_count=max(counts), infection_prob=args.prob),
                          counts, args.threads)
    print(f"simulated {max(counts)} cascades in {time.perf_counter() - t0:.1f}s")
    for cs in sets:
        t0 = time.perf_counter()
        inferred = infer(cs, g.m, "undirected", workers=args.threads)
        dt = time.perf_counter() - t0
        print(f"{len(cs):6d} cascades  infer {dt:6.2f}s  F={edge_metrics(g, inferred).f_measure:.3f}")


if __name__ == "__main__":
    main()
