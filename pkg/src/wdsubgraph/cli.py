"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 input/IO error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import PRESETS, __version__
from .dataset import (
    DatasetFormatError,
    InvariantError,
    MissingLabel,
    README_KEYS,
    build_dataset,
    compute_stats,
    edge_type_distribution,
    read_dataset,
    read_readme,
    write_dataset,
)
from .dump_stream import DEFAULT_READ_WINDOW, DumpError, DumpSource, open_dump
from .entity_model import EntityId, IdError
from .extraction import FactStore, LabelTable, NodeSet
from .hierarchy import FormatError, TopicMismatch
from .pipeline import ConfigError, RunConfig, env_int, run_extract
from .postprocess import DEGREE_MODES, SplitSpec, filter_min_degree, split_edges, write_split
from .synthgen import SHAPES, SynthSpec, oracle_extract, write_dump

EXIT_OK, EXIT_CONFIG, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


def _topic(args) -> tuple[EntityId, str | None]:
    if args.preset and args.topic:
        raise ConfigError("give either --topic or --preset, not both")
    if args.preset:
        return EntityId.parse(PRESETS[args.preset]), args.preset
    if not args.topic:
        raise ConfigError("one of --topic or --preset is required")
    try:
        return EntityId.parse(args.topic), None
    except IdError as exc:
        raise ConfigError(str(exc)) from None


def cmd_extract(args) -> int:
    topic, name = _topic(args)
    config = RunConfig(
        dump_path=Path(args.dump),
        topic=topic,
        out_dir=Path(args.out),
        topic_name=args.topic_name or name,
        codec=args.codec,
        read_window=args.read_window if args.read_window is not None else env_int("WDSUB_READ_WINDOW", DEFAULT_READ_WINDOW),
        hierarchy_source=args.hierarchy_source,
        hierarchy_cache=Path(args.hierarchy_cache) if args.hierarchy_cache else None,
        labels_mode=args.labels,
        workers=args.workers if args.workers is not None else env_int("WDSUB_WORKERS", 1),
        force=args.force,
    )
    _, _, report = run_extract(config)
    for line in report.lines():
        print(line, file=sys.stderr)
    return EXIT_OK


def cmd_stats(args) -> int:
    ds = read_dataset(args.dataset)
    stats = compute_stats(ds).as_dict()
    readme = read_readme(Path(args.dataset, "readme.txt"))
    for key, value in stats.items():
        print(f"{key}: {value}")
        if key in readme and readme[key] != str(value):
            print(f"warning: {key} recomputed as {value} but readme.txt says {readme[key]}", file=sys.stderr)
    missing = [k for k in README_KEYS if k not in readme]
    if missing:
        print(f"warning: readme.txt lacks keys: {', '.join(missing)}", file=sys.stderr)
    print(f"edge types (top {args.top_k}):")
    for label, count in edge_type_distribution(ds, args.top_k):
        print(f"{label}\t{count}")
    return EXIT_OK


def cmd_filter_split(args) -> int:
    ds_dir = Path(args.dataset)
    ds = read_dataset(ds_dir)
    digest = hashlib.sha256(Path(ds_dir, "edges.txt").read_bytes()).hexdigest()
    try:
        spec = SplitSpec(args.train_fraction, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    edges = filter_min_degree(ds.edges, args.min_degree, args.degree_mode)
    if edges.shape[0] == 0:
        raise ConfigError("no edges left after degree filtering")
    out = Path(args.out)
    if out.exists() and any(out.iterdir()) and not args.force:
        raise ConfigError(f"output directory {out} is not empty (pass --force to overwrite)")
    train, test = split_edges(edges, spec)
    write_split(train, test, spec, out, digest,
                extra={"min_degree": args.min_degree, "degree_mode": args.degree_mode,
                       "filtered_edges": int(edges.shape[0])})
    print(f"edges: {ds.edges.shape[0]} -> {edges.shape[0]} after filtering; "
          f"train {train.shape[0]}, test {test.shape[0]}", file=sys.stderr)
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = SynthSpec(
        seed=args.seed,
        n_classes=args.classes,
        hierarchy_shape=args.shape,
        n_instances=args.instances,
        n_offtopic=args.offtopic,
        facts_per_entity=(args.facts_min, args.facts_max),
        english_label_rate=args.english_rate,
        n_properties=args.properties,
        n_offtopic_classes=args.offtopic_classes,
        noise=not args.no_noise,
    )
    out = Path(args.out)
    codec = {"none": "none", "bz2": "bzip2", "gz": "gzip"}[args.codec]
    truth = write_dump(spec, out, codec=codec)
    truth_path = Path(args.truth) if args.truth else out.parent / "ground_truth.json"
    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump(truth.to_json(), fh, ensure_ascii=False, indent=1)
        fh.write("\n")
    print(f"topic: Q{truth.topic}", file=sys.stderr)
    print(f"lines: {truth.n_lines}", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args) -> int:
    topic, name = _topic(args)
    data = b"\n".join(open_dump(DumpSource(args.dump, args.codec)))
    truth = oracle_extract(data, topic, args.labels)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(truth.to_json(), fh, ensure_ascii=False, indent=1)
            fh.write("\n")
    if args.out:
        labels = LabelTable(dict(truth.entity_labels), dict(truth.relation_labels), truth.label_fallbacks)
        ds = build_dataset(NodeSet(sorted(truth.nodes)), FactStore(sorted(truth.edges | truth.attributes)),
                           labels, topic=topic, topic_name=args.topic_name or name)
        write_dataset(ds, args.out, force=args.force)
    for key, value in truth.stats.items():
        print(f"{key}: {value}")
    return EXIT_OK


def _add_topic_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--topic", help="topic class QID, e.g. Q5")
    p.add_argument("--preset", choices=sorted(PRESETS), help="named topic from the built-in presets")
    p.add_argument("--topic-name", help="name written to readme.txt (defaults to the preset name or the QID)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wdsubgraph", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract a topic subgraph from a dump")
    p.add_argument("--dump", required=True)
    _add_topic_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--codec", default="auto", choices=["auto", "none", "bz2", "gz"])
    p.add_argument("--read-window", type=int, default=None, help="bytes; env WDSUB_READ_WINDOW")
    p.add_argument("--hierarchy-source", default="dump", choices=["dump", "file"])
    p.add_argument("--hierarchy-cache")
    p.add_argument("--labels", default="en", choices=["en", "en-fallback-any"])
    p.add_argument("--workers", type=int, default=None, help="env WDSUB_WORKERS; default 1")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("stats", help="recompute dataset statistics from its files")
    p.add_argument("dataset")
    p.add_argument("--top-k", type=int, default=20)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("filter-split", help="degree-filter edges and write a seeded train/test split")
    p.add_argument("dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--min-degree", type=int, default=5)
    p.add_argument("--degree-mode", default="incidences", choices=DEGREE_MODES)
    p.add_argument("--train-fraction", default="0.8")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_filter_split)

    p = sub.add_parser("synth", help="write a synthetic dump and its ground truth")
    p.add_argument("out")
    p.add_argument("--truth", help="ground-truth JSON path (default: ground_truth.json next to the dump)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--shape", default="tree", choices=SHAPES)
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--offtopic", type=int, default=50)
    p.add_argument("--facts-min", type=int, default=0)
    p.add_argument("--facts-max", type=int, default=6)
    p.add_argument("--english-rate", type=float, default=0.7)
    p.add_argument("--properties", type=int, default=12)
    p.add_argument("--offtopic-classes", type=int, default=3)
    p.add_argument("--no-noise", action="store_true")
    p.add_argument("--codec", default="none", choices=["none", "bz2", "gz"])
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("oracle", help="brute-force reference extraction (small dumps only)")
    p.add_argument("dump")
    _add_topic_args(p)
    p.add_argument("--codec", default="auto", choices=["auto", "none", "bz2", "gz"])
    p.add_argument("--labels", default="en", choices=["en", "en-fallback-any"])
    p.add_argument("--out", help="also write the result as a dataset directory")
    p.add_argument("--json", help="write the result as JSON")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, TopicMismatch, FileExistsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvariantError, MissingLabel) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (DumpError, FormatError, DatasetFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
