"""Command line entry point: ``netinfer generate|simulate|infer|evaluate|pipeline``.

Exit codes: 0 success, 1 config error, 2 I/O error, 3 pipeline-stage failure.
Flags override values read from ``--config`` (a ``key=value`` file).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import cascades as cio
from .config import (AUTO_K, ConfigError, ExperimentConfig, InferConfig, build,
                     config_hash, experiment_from_kv, parse_value, read_kv)
from .evaluation import community_report, edge_metrics, structure_metrics
from .experiments import StageError, run_pipeline
from .graphs import GenConfig, GenerationError, GraphFormatError, load_graph, load_partition
from .graphs import planted_partition, write_graph, write_partition
from .inference import baseline_time_adjacency, infer, read_inferred, write_inferred
from .simulate import SimConfig, SimulationError, simulate_batch

log = logging.getLogger("netinfer")

OUTPUT_ENV = "NETINFER_OUTPUT_DIR"
EXIT_CONFIG, EXIT_IO, EXIT_STAGE = 1, 2, 3


class InputError(Exception):
    """Unreadable or malformed input file."""


def _default_out() -> str:
    return os.environ.get(OUTPUT_ENV, ".")


def _section(values: dict, prefix: str) -> dict:
    """Pick ``prefix.key`` entries (or bare keys) out of a config file."""
    out = {}
    for k, v in values.items():
        head, dot, tail = k.partition(".")
        if dot and head == prefix:
            out[tail] = v
        elif not dot:
            out[k] = v
    return out


def _overrides(args, mapping: dict[str, str]) -> dict:
    out = {}
    for flag, key in mapping.items():
        val = getattr(args, flag, None)
        if val is not None:
            out[key] = parse_value(val) if isinstance(val, str) else val
    return out


def _load_config(args, section: str, cls, mapping):
    values = {}
    if getattr(args, "config", None):
        try:
            values = _section(read_kv(args.config), section)
        except OSError as e:
            raise InputError(str(e)) from e
        fields = {f for f in cls.__dataclass_fields__}
        values = {k: v for k, v in values.items() if k in fields}
    values.update(_overrides(args, mapping))
    return build(cls, values)


def _read(fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except (OSError, cio.CascadeFormatError, GraphFormatError, UnicodeDecodeError) as e:
        raise InputError(str(e)) from e
    except ValueError as e:
        raise InputError(str(e)) from e


# ---------------------------------------------------------------- subcommands

GEN_FLAGS = {"n": "n", "mu": "mu", "avg_degree": "avg_degree", "max_degree": "max_degree",
             "community_sizes": "community_sizes", "min_community": "min_community",
             "max_community": "max_community", "degree_exponent": "degree_exponent",
             "community_exponent": "community_exponent", "edge_count": "edge_count",
             "seed": "rng_seed"}

SIM_FLAGS = {"cascades": "cascade_count", "prob": "infection_prob", "delay_scale": "delay_scale",
             "max_size": "max_cascade_size", "seed": "rng_seed", "max_retries": "max_retries"}


def cmd_generate(args) -> int:
    cfg = _load_config(args, "gen", GenConfig, GEN_FLAGS)
    g, part = planted_partition(cfg)
    out = Path(args.out or _default_out())
    out.mkdir(parents=True, exist_ok=True)
    write_graph(g, out / "graph.tsv")
    write_partition(part, out / "partition.tsv")
    print(f"wrote {out / 'graph.tsv'} (n={g.n}, m={g.m}) and {out / 'partition.tsv'} "
          f"({len(part)} communities)")
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_config(args, "sim", SimConfig, SIM_FLAGS)
    g = _read(load_graph, args.graph)
    counts = [int(c) for c in args.counts.split(",")] if args.counts else [cfg.cascade_count]
    sets = simulate_batch(g, cfg, counts, workers=args.threads)
    if args.counts:
        out = Path(args.out or _default_out())
        out.mkdir(parents=True, exist_ok=True)
        for cs in sets:
            cio.write_cascades(cs, out / f"cascades_{len(cs)}.txt", args.format)
        print(f"wrote {len(sets)} cascade files to {out}")
    else:
        path = Path(args.out or Path(_default_out()) / "cascades.txt")
        path.parent.mkdir(parents=True, exist_ok=True)
        cio.write_cascades(sets[0], path, args.format)
        print(f"wrote {len(sets[0])} cascades to {path}")
    return 0


def cmd_infer(args) -> int:
    cs = _read(cio.parse_cascades, args.cascades, args.format)
    if args.k in ("auto", AUTO_K):
        if not args.truth:
            raise ConfigError("--k auto needs --truth")
        k = _read(load_graph, args.truth).m
    else:
        try:
            k = int(args.k)
        except ValueError:
            raise ConfigError(f"--k must be an integer or 'auto', got {args.k!r}") from None
    InferConfig(k=k, mode=args.mode)
    algo = infer if args.algo == "dani" else baseline_time_adjacency
    g = algo(cs, k, args.mode, workers=args.threads)
    if g.saturated:
        print(f"warning: K={k} exceeds {len(g.edges)} candidate pairs; output saturated",
              file=sys.stderr)
    path = Path(args.out or Path(_default_out()) / "inferred.tsv")
    path.parent.mkdir(parents=True, exist_ok=True)
    write_inferred(g, path)
    print(f"wrote {len(g.edges)} edges to {path}")
    return 0


def cmd_evaluate(args) -> int:
    truth = _read(load_graph, args.truth)
    inferred = _read(read_inferred, args.inferred)
    report = {
        "truth": str(args.truth),
        "inferred": str(args.inferred),
        "detector_seed": args.detector_seed,
        "edges": edge_metrics(truth, inferred).to_dict(),
        "structure": structure_metrics(truth, inferred).to_dict(),
        "community": None,
    }
    if args.partition and Path(args.partition).exists():
        part = _read(load_partition, args.partition)
        report["community"] = community_report(truth, part, inferred,
                                               detector_seed=args.detector_seed).to_dict()
    elif args.partition:
        print(f"warning: partition {args.partition} not found; community metrics skipped",
              file=sys.stderr)
    report["config_hash"] = config_hash({k: report[k] for k in ("truth", "inferred", "detector_seed")})
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.tsv:
        _append_tsv(Path(args.tsv), report)
    return 0


TSV_FIELDS = ("precision", "recall", "f_measure", "node_recovery", "degree_rel_err",
              "clustering_rel_err", "nmi", "pwf", "density_gap", "conductance_gap", "nc")


def _append_tsv(path: Path, report: dict) -> None:
    flat = {**report["edges"], **report["structure"], **(report["community"] or {})}
    new = not path.exists()
    with open(path, "a") as fh:
        if new:
            fh.write("inferred\tdetector_seed\tconfig_hash\t" + "\t".join(TSV_FIELDS) + "\n")
        vals = ["null" if flat.get(f) is None else repr(flat[f]) for f in TSV_FIELDS]
        fh.write(f"{report['inferred']}\t{report['detector_seed']}\t{report['config_hash']}\t"
                 + "\t".join(vals) + "\n")


def cmd_pipeline(args) -> int:
    values = {}
    if args.config:
        try:
            values = read_kv(args.config)
        except OSError as e:
            raise InputError(str(e)) from e
    if args.out:
        values["output_dir"] = args.out
    elif "output_dir" not in values and OUTPUT_ENV in os.environ:
        values["output_dir"] = os.environ[OUTPUT_ENV]
    cfg = experiment_from_kv(values, ExperimentConfig())
    out = run_pipeline(cfg, workers=args.threads)
    print(f"wrote {out / 'sweep.csv'}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="netinfer", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="community-structured ground-truth graph")
    g.add_argument("--config")
    g.add_argument("--n", type=int)
    g.add_argument("--mu", type=float)
    g.add_argument("--avg-degree", type=float)
    g.add_argument("--max-degree", type=int)
    g.add_argument("--community-sizes", help="comma list; overrides min/max community")
    g.add_argument("--min-community", type=int)
    g.add_argument("--max-community", type=int)
    g.add_argument("--degree-exponent", help="float, or 'none' for equal degrees")
    g.add_argument("--community-exponent", type=float)
    g.add_argument("--edge-count", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", help="output directory")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("simulate", help="cascades over a graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--config")
    s.add_argument("--cascades", type=int)
    s.add_argument("--counts", help="comma list; writes prefix-consistent files")
    s.add_argument("--prob", type=float)
    s.add_argument("--delay-scale", type=float)
    s.add_argument("--max-size", type=int)
    s.add_argument("--max-retries", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--format", choices=(cio.SNAP, cio.TSV), default=cio.SNAP)
    s.add_argument("--out", help="file, or directory with --counts")
    s.add_argument("--threads", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    i = sub.add_parser("infer", help="inferred edge list from cascades")
    i.add_argument("--cascades", required=True)
    i.add_argument("--format", choices=(cio.SNAP, cio.TSV), default=cio.SNAP)
    i.add_argument("--k", required=True, help="edge count, or 'auto' with --truth")
    i.add_argument("--truth")
    i.add_argument("--mode", choices=("directed", "undirected"), default="directed")
    i.add_argument("--algo", choices=("dani", "baseline"), default="dani")
    i.add_argument("--out")
    i.add_argument("--threads", type=int, default=1)
    i.set_defaults(func=cmd_infer)

    e = sub.add_parser("evaluate", help="score an inferred edge list")
    e.add_argument("--truth", required=True)
    e.add_argument("--partition")
    e.add_argument("--inferred", required=True)
    e.add_argument("--detector-seed", type=int, default=0)
    e.add_argument("--out", help="JSON report path (stdout if omitted)")
    e.add_argument("--tsv", help="append one TSV row here")
    e.set_defaults(func=cmd_evaluate)

    pl = sub.add_parser("pipeline", help="generate, simulate, infer and evaluate sweep")
    pl.add_argument("--config")
    pl.add_argument("--out")
    pl.add_argument("--threads", type=int, default=1)
    pl.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except StageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_STAGE
    except (ConfigError, GenerationError, SimulationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
