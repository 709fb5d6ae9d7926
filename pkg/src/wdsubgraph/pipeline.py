"""End-to-end extraction: hierarchy -> selection -> labels -> dataset files."""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path

from .dataset import IndexedDataset, OutputExistsError, StatsReport, build_dataset, write_dataset
from .dump_stream import DEFAULT_READ_WINDOW, DumpSource, open_dump
from .entity_model import EntityId
from .extraction import RunReport, needed_ids, resolve_labels, scan_dump
from .hierarchy import ClassClosure, collect_subclass_edges, compute_closure, load_closure_file, save_closure_file
from .passes import LABEL_MODES, BatchTally

log = logging.getLogger(__name__)

RUN_LOG = "run.log"


class ConfigError(ValueError):
    pass


def env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw in (None, ""):
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


@dataclass
class RunConfig:
    dump_path: Path
    topic: EntityId
    out_dir: Path
    topic_name: str | None = None
    codec: str = "auto"
    read_window: int = DEFAULT_READ_WINDOW
    hierarchy_source: str = "dump"
    hierarchy_cache: Path | None = None
    labels_mode: str = "en"
    workers: int = 1
    force: bool = False

    def validate(self) -> None:
        if self.workers < 1:
            raise ConfigError("worker count must be >= 1")
        if self.read_window < 1:
            raise ConfigError("read window must be positive")
        if self.labels_mode not in LABEL_MODES:
            raise ConfigError(f"labels mode must be one of {LABEL_MODES}")
        if self.hierarchy_source not in ("dump", "file"):
            raise ConfigError("hierarchy source must be 'dump' or 'file'")
        if self.hierarchy_source == "file" and self.hierarchy_cache is None:
            raise ConfigError("--hierarchy-source file needs --hierarchy-cache")
        out = Path(self.out_dir)
        if out.exists() and (not out.is_dir() or (any(out.iterdir()) and not self.force)):
            raise ConfigError(f"output directory {out} is not empty (pass --force to overwrite)")


def build_closure(config: RunConfig, source: DumpSource) -> ClassClosure:
    if config.hierarchy_source == "file":
        return load_closure_file(config.hierarchy_cache, config.topic)
    edges = collect_subclass_edges(open_dump(source), config.workers)
    closure = compute_closure(config.topic, edges)
    log.info("hierarchy: %d subclass edges, %d classes in closure", len(edges), len(closure))
    if config.hierarchy_cache is not None:
        save_closure_file(closure, config.hierarchy_cache)
    return closure


def run_extract(config: RunConfig) -> tuple[IndexedDataset, StatsReport, RunReport]:
    """Run every pass and write the dataset directory; returns what was written."""
    config.validate()
    t0 = time.perf_counter()
    source = DumpSource(config.dump_path, config.codec, config.read_window)
    closure = build_closure(config, source)

    tally = BatchTally()
    nodes, facts, partial = scan_dump(lambda: open_dump(source), closure, config.workers, config.labels_mode, tally)
    labels = resolve_labels(lambda: open_dump(source), needed_ids(nodes, facts), partial,
                            config.workers, config.labels_mode)

    report = RunReport()
    report.absorb(tally)
    report.nodes = len(nodes)
    report.facts = len(facts)
    report.self_loops = int((facts.rows[:, 0] == facts.rows[:, 2]).sum())
    report.label_fallbacks = labels.fallbacks
    report.label_pass = labels.ran_pass

    ds = build_dataset(nodes, facts, labels, topic=config.topic, topic_name=config.topic_name)
    try:
        stats = write_dataset(ds, config.out_dir, force=config.force)
    except OutputExistsError as exc:
        raise ConfigError(str(exc)) from None
    lines = report.lines()
    Path(config.out_dir, RUN_LOG).write_text("\n".join(lines) + "\n", encoding="utf-8")
    log.info("finished in %.1fs", time.perf_counter() - t0)
    return ds, stats, report
