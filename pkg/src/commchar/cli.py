"""Command-line driver: ``commchar {communities,measures,mine,characterize,pipeline}``.

Every stage reads its inputs from, and writes its outputs to, the ``--out``
directory, so a stage can be rerun (or fed an external community file)
without repeating the upstream ones.

Exit codes: 0 ok, 1 usage or configuration error, 2 data error,
3 resource guard tripped.
"""

from __future__ import annotations

import argparse
import json
import logging
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .characterize import characterize, dumps_reports, render_table
from .community import filter_small, louvain, modularity, read_communities, write_communities
from .config import ConfigError, PipelineConfig, resolve
from .measures import compute_table, read_measures, write_measures
from .miner import MiningLimitExceeded, mine_closed, read_patterns, split_by_class, write_patterns
from .network import NetworkFormatError, aggregate, load_network
from .sequences import build_database, read_database, write_database

logger = logging.getLogger("commchar")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RESOURCE = 0, 1, 2, 3

STAGES = ("communities", "measures", "mine", "characterize")
OUTPUTS = {
    "communities": ("communities.csv",),
    "measures": ("measures.csv",),
    "mine": ("database.txt", "patterns.txt"),
    "characterize": ("reports.json", "reports.txt"),
}
MANIFEST = "manifest.json"


class StageError(Exception):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


class _Run:
    """Shared state for one invocation; loads upstream artifacts lazily."""

    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.out = Path(cfg.out)
        self._net = None
        self._comm = None
        self.info: dict = {}

    def path(self, name: str) -> Path:
        return self.out / name

    @property
    def net(self):
        if self._net is None:
            if self.cfg.edges is None:
                raise ValueError("no edges file given (--edges or [pipeline] edges)")
            self._net = load_network(self.cfg.edges, self.cfg.attrs)
        return self._net

    @property
    def labels(self):
        return self.net.node_labels

    @property
    def comm(self):
        if self._comm is None:
            self._comm = read_communities(self.path("communities.csv"), self.labels)
        return self._comm

    @property
    def specs(self):
        return self.cfg.descriptor_specs(self.net.attribute_names)

    # -- stages ----------------------------------------------------------------

    def communities(self):
        gw = aggregate(self.net)
        comm = louvain(gw, self.cfg.seed)
        write_communities(comm, self.path("communities.csv"), self.labels)
        self._comm = comm
        self.info["communities"] = {
            "count": comm.count,
            "modularity": round(modularity(gw, comm), 12) if gw.total_weight else None,
            "sizes": comm.sizes,
            "retained": filter_small(comm, self.cfg.min_community_size),
        }

    def measures(self):
        table = compute_table(self.net, self.comm)
        write_measures(table, self.path("measures.csv"), self.labels)

    def mine(self):
        net = self.net
        specs = self.specs
        needs = any(s.kind == "measure" for s in specs)
        table = read_measures(self.path("measures.csv"), net.n, net.theta, self.labels) if needs else None
        db = build_database(net, table, self.comm, specs)
        write_database(db, self.path("database.txt"), specs, self.labels)
        patterns = mine_closed(db, self.cfg.min_sup, self.cfg.max_candidates)
        write_patterns(patterns, self.path("patterns.txt"), specs)
        self.info["mine"] = {"patterns": len(patterns), "min_sup": self.cfg.min_sup}

    def characterize(self):
        specs = self.specs
        db = read_database(self.path("database.txt"), self.comm, specs, self.labels)
        patterns = read_patterns(self.path("patterns.txt"), specs)
        buckets = split_by_class(patterns)
        retained = filter_small(self.comm, self.cfg.min_community_size)
        reports = characterize(db, buckets, retained, self.cfg.max_patterns, self.cfg.threads)
        self.path("reports.json").write_text(dumps_reports(reports, specs, self.labels), encoding="utf-8")
        self.path("reports.txt").write_text(render_table(reports, specs, self.labels), encoding="utf-8")
        self.info["characterize"] = {
            "communities": len(reports),
            "uncharacterized": [r.community for r in reports if r.note],
        }

    def run_stage(self, stage: str):
        started = time.perf_counter()
        try:
            getattr(self, stage)()
        except BaseException as exc:
            for name in OUTPUTS[stage]:
                self.path(name).unlink(missing_ok=True)
            raise StageError(stage, exc) from exc
        self.info.setdefault("timings", {})[stage] = round(time.perf_counter() - started, 3)
        logger.info("stage %s done in %.2fs", stage, self.info["timings"][stage])

    def write_manifest(self, stages):
        path = self.path(MANIFEST)
        previous = {}
        if path.exists():
            try:
                previous = json.loads(path.read_text(encoding="utf-8"))
            except ValueError:
                previous = {}
        doc = {
            "config": self.cfg.to_ini(),
            "versions": {
                "commchar": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
            },
            "stages": {**previous.get("stages", {}), **{s: self.info.get(s, {}) for s in stages}},
            "timings": {**previous.get("timings", {}), **self.info.get("timings", {})},
            "outputs": sorted(
                name for s in STAGES for name in OUTPUTS[s] if self.path(name).exists()
            ),
        }
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def run_pipeline(cfg: PipelineConfig, stages=STAGES, resume: bool = False) -> int:
    """Run ``stages`` in order; returns an exit code (errors are logged)."""
    if cfg.out is None:
        logger.error("no output directory given (--out or [pipeline] out)")
        return EXIT_USAGE
    Path(cfg.out).mkdir(parents=True, exist_ok=True)
    run = _Run(cfg)
    done = []
    try:
        for stage in stages:
            if resume and all(run.path(n).exists() for n in OUTPUTS[stage]):
                logger.info("stage %s: outputs present, skipped", stage)
                continue
            run.run_stage(stage)
            done.append(stage)
    except StageError as exc:
        logger.error("%s", exc)
        run.write_manifest(done)
        if isinstance(exc.cause, MiningLimitExceeded):
            return EXIT_RESOURCE
        if isinstance(exc.cause, (ValueError, OSError, KeyError, NetworkFormatError)):
            return EXIT_DATA
        raise
    run.write_manifest(done)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--edges", help="edges CSV (t,u,v)")
    p.add_argument("--attrs", help="attributes CSV (t,node,attr,value)")
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--min-sup", type=float, dest="min_sup")
    p.add_argument("--seed", type=int)
    p.add_argument("--min-community-size", type=int, dest="min_community_size")
    p.add_argument("--max-patterns", type=int, dest="max_patterns")
    p.add_argument("--max-candidates", type=int, dest="max_candidates")
    p.add_argument("--out", help="output directory")
    p.add_argument("--threads", type=int)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="commchar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in STAGES:
        _common(sub.add_parser(name, help=f"run the {name} stage"))
    p = sub.add_parser("pipeline", help="run every stage")
    _common(p)
    p.add_argument("--resume", action="store_true", help="skip stages whose outputs already exist")
    p.add_argument("--stages", help="comma-separated subset of stages, in pipeline order")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    flags = {k: getattr(args, k) for k in (
        "edges", "attrs", "out", "min_sup", "seed", "min_community_size",
        "max_patterns", "max_candidates", "threads",
    )}
    try:
        cfg = resolve(args.config, **flags)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "pipeline":
        stages = STAGES
        if args.stages:
            wanted = [s.strip() for s in args.stages.split(",") if s.strip()]
            unknown = [s for s in wanted if s not in STAGES]
            if unknown:
                print(f"unknown stage(s): {', '.join(unknown)}", file=sys.stderr)
                return EXIT_USAGE
            stages = tuple(s for s in STAGES if s in wanted)
        return run_pipeline(cfg, stages, resume=args.resume)
    return run_pipeline(cfg, (args.command,))


if __name__ == "__main__":
    sys.exit(main())
