"""Pipeline command-line interface.

Each stage reads the previous stage's artifacts from the output directory and
writes its own, so very large inputs can be processed stage by stage and
partially re-run.  Artifact paths are printed as ``ARTIFACT <kind> <path>``
lines for scripting.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import capitalists as cap_mod
from . import clustering as clu_mod
from . import community as com_mod
from . import graph as graph_mod
from . import reports as rep_mod
from . import roles as roles_mod
from . import synth as synth_mod
from .errors import MissingArtifactError, RolenetError

logger = logging.getLogger(__name__)

STAGES = ("ingest", "communities", "measures", "detect", "cluster", "report")

ARTIFACT_FILES = {
    "graph": "graph.bin",
    "partition": "partition.tsv",
    "features": "features.csv",
    "capitalists": "capitalists.csv",
    "clusters": "clusters.csv",
    "centroids": "centroids.csv",
    "db_table": "db_table.csv",
    "distribution_csv": "distribution.csv",
    "distribution_json": "distribution.json",
    "interconnection_csv": "interconnection.csv",
    "interconnection_json": "interconnection.json",
    "interconnection_dot": "interconnection.dot",
}


@dataclass
class PipelineConfig:
    """All knobs; defaults follow the published analysis."""

    input: str = ""
    outdir: str = "rolenet-out"
    overlap_threshold: float = 0.74
    min_followers: int = 500
    min_followees: int = 500
    high_degree: int = 10000
    passive_bound: float = 0.7
    louvain_seed: int = 0
    measure_set: str = "generalized"  # original | directed | generalized
    k_min: int = 2
    k_max: int = 15
    cluster_seed: int = 0
    restarts: int = 10
    normalization: str = "zscore"  # zscore | minmax
    filter_min_pct_all: float = 1.0
    filter_min_pct_source: float = 10.0
    threads: int = 0  # 0 = auto; current kernels are single-threaded


_INT_KEYS = {"min_followers", "min_followees", "high_degree", "louvain_seed",
             "k_min", "k_max", "cluster_seed", "restarts", "threads"}
_FLOAT_KEYS = {"overlap_threshold", "passive_bound",
               "filter_min_pct_all", "filter_min_pct_source"}


def load_config_file(path) -> dict:
    """Flat 'key=value' config file; '#' starts a comment."""
    values = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise RolenetError(f"{path}:{lineno}: expected 'key=value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in PipelineConfig.__dataclass_fields__:
                raise RolenetError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = value
    return values


def build_config(args) -> PipelineConfig:
    cfg = PipelineConfig()
    if args.config:
        for key, raw in load_config_file(args.config).items():
            setattr(cfg, key, _coerce(key, raw))
    for key in PipelineConfig.__dataclass_fields__:
        flag = getattr(args, key, None)
        if flag is not None:
            setattr(cfg, key, flag)
    return cfg


def _coerce(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError as exc:
        raise RolenetError(f"config key {key}: {exc}") from exc
    return raw


class Pipeline:
    def __init__(self, cfg: PipelineConfig, out=None):
        self.cfg = cfg
        self.out = out if out is not None else sys.stdout
        self.outdir = Path(cfg.outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self._timings = {}

    # -- artifact bookkeeping -------------------------------------------------

    def path(self, kind: str) -> Path:
        return self.outdir / ARTIFACT_FILES[kind]

    def announce(self, kind: str) -> None:
        self.out.write(f"ARTIFACT {kind} {self.path(kind)}\n")

    def require(self, kind: str, produced_by: str) -> Path:
        p = self.path(kind)
        if not p.exists():
            raise MissingArtifactError(
                f"missing {p.name}; run the '{produced_by}' stage first"
            )
        return p

    def write_manifest(self) -> None:
        artifacts = {}
        for kind, name in ARTIFACT_FILES.items():
            p = self.outdir / name
            if p.exists():
                artifacts[kind] = {
                    "path": name,
                    "sha256": hashlib.sha256(p.read_bytes()).hexdigest(),
                }
        manifest = {
            "schema": "rolenet.manifest.v1",
            "config": dataclasses.asdict(self.cfg),
            "input_sha256": self._input_checksum(),
            "artifacts": artifacts,
            "timings_s": self._timings,
        }
        path = self.outdir / "manifest.json"
        path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n",
                        encoding="utf-8")
        self.out.write(f"ARTIFACT manifest {path}\n")

    def _input_checksum(self):
        p = Path(self.cfg.input) if self.cfg.input else None
        if p and p.exists():
            return hashlib.sha256(p.read_bytes()).hexdigest()
        return None

    def _timed(self, stage, fn):
        start = time.perf_counter()
        fn()
        self._timings[stage] = round(time.perf_counter() - start, 6)

    # -- stages ---------------------------------------------------------------

    def stage_ingest(self) -> None:
        if not self.cfg.input:
            raise RolenetError("ingest requires an input edge list (--input)")
        g = graph_mod.ingest_edge_list(self.cfg.input)
        graph_mod.save_cache(g, self.path("graph"))
        self.announce("graph")

    def _graph(self):
        return graph_mod.load_cache(self.require("graph", "ingest"))

    def stage_communities(self) -> None:
        g = self._graph()
        p = com_mod.louvain(g, com_mod.LouvainConfig(seed=self.cfg.louvain_seed))
        com_mod.save_partition(g, p, self.path("partition"))
        self.announce("partition")

    def stage_measures(self) -> None:
        g = self._graph()
        p = com_mod.load_partition(g, self.require("partition", "communities"))
        fm = roles_mod.compute_measures(g, p, self.cfg.measure_set)
        roles_mod.save_features(g, fm, self.path("features"))
        self.announce("features")

    def stage_detect(self) -> None:
        g = self._graph()
        det_cfg = cap_mod.DetectionConfig(
            overlap_threshold=self.cfg.overlap_threshold,
            min_followers=self.cfg.min_followers,
            min_followees=self.cfg.min_followees,
            high_degree=self.cfg.high_degree,
            passive_bound=self.cfg.passive_bound,
        )
        records = cap_mod.detect(g, det_cfg)
        cap_mod.save_records(g, records, self.path("capitalists"))
        self.announce("capitalists")

    def stage_cluster(self) -> None:
        g = self._graph()
        fm = roles_mod.load_features(g, self.require("features", "measures"))
        normalized, params = clu_mod.normalize(fm, method=self.cfg.normalization)
        sweep = clu_mod.sweep_k(
            normalized.values,
            k_min=self.cfg.k_min,
            k_max=min(self.cfg.k_max, g.node_count),
            seed=self.cfg.cluster_seed,
            restarts=self.cfg.restarts,
        )
        best = sweep.best
        original_units = params.invert(best.centroids)
        if fm.tag == roles_mod.GENERALIZED8:
            best.labels = clu_mod.label_clusters(original_units, fm.columns)
        clu_mod.save_assignment(g.labels, best, self.path("clusters"))
        clu_mod.save_centroids(fm.columns, best.centroids, original_units,
                               best.labels, self.path("centroids"))
        clu_mod.save_db_table(sweep.table, self.path("db_table"))
        for kind in ("clusters", "centroids", "db_table"):
            self.announce(kind)

    def _clustering(self, g):
        path = self.require("clusters", "cluster")
        assignment = np.full(g.node_count, -1, dtype=np.int64)
        import csv as _csv
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = _csv.reader(f)
            header = next(reader, None)
            if not header or header[0] != "node":
                raise RolenetError(f"{path}: not a cluster assignment CSV")
            for row in reader:
                if not row:
                    continue
                assignment[g.index_of(row[0])] = int(row[1])
        if (assignment < 0).any():
            raise RolenetError(f"{path}: does not cover all graph nodes")
        k = int(assignment.max()) + 1
        return clu_mod.Clustering(k=k, assignment=assignment,
                                  centroids=np.zeros((k, 1)))

    def stage_report(self) -> None:
        g = self._graph()
        clustering = self._clustering(g)
        records = cap_mod.load_records(g, self.require("capitalists", "detect"))

        table = rep_mod.capitalist_distribution(records, clustering)
        inter = rep_mod.cluster_interconnection(
            g, clustering,
            min_pct_all=self.cfg.filter_min_pct_all,
            min_pct_source=self.cfg.filter_min_pct_source,
        )
        self.path("distribution_csv").write_text(rep_mod.export(table, "csv"))
        self.path("distribution_json").write_text(rep_mod.export(table, "json"))
        self.path("interconnection_csv").write_text(rep_mod.export(inter, "csv"))
        self.path("interconnection_json").write_text(rep_mod.export(inter, "json"))
        self.path("interconnection_dot").write_text(rep_mod.export(inter, "dot"))
        for kind in ("distribution_csv", "distribution_json",
                     "interconnection_csv", "interconnection_json",
                     "interconnection_dot"):
            self.announce(kind)

    def run(self, stage: str) -> None:
        stages = STAGES if stage == "all" else (stage,)
        for name in stages:
            self._timed(name, getattr(self, f"stage_{name}"))
        self.write_manifest()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value config file")
    for f in dataclasses.fields(PipelineConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name in _INT_KEYS:
            sub.add_argument(flag, type=int, default=None)
        elif f.name in _FLOAT_KEYS:
            sub.add_argument(flag, type=float, default=None)
        else:
            sub.add_argument(flag, default=None)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="rolenet",
        description=(
            "Detect social capitalists in a directed follower network and "
            "characterize node community roles. Degree floors and the overlap "
            "threshold are strict (a node needs MORE followers/followees/"
            "overlap than the configured value to pass)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*STAGES, "all"):
        stage_parser = sub.add_parser(name, help=f"run the {name} stage")
        _add_config_flags(stage_parser)

    synth_parser = sub.add_parser("synth", help="generate a planted test graph")
    synth_parser.add_argument("--sizes", default="100,100,100,100",
                              help="comma-separated community sizes")
    synth_parser.add_argument("--p-intra", type=float, default=0.1)
    synth_parser.add_argument("--p-inter", type=float, default=0.01)
    synth_parser.add_argument("--capitalists", type=int, default=0)
    synth_parser.add_argument("--reciprocity", type=float, default=0.95)
    synth_parser.add_argument("--seed", type=int, default=0)
    synth_parser.add_argument("--edges-out", required=True)
    synth_parser.add_argument("--truth-out", required=True)
    return parser


def _run_synth(args) -> None:
    sizes = tuple(int(s) for s in args.sizes.split(","))
    plant = None
    if args.capitalists:
        plant = synth_mod.CapitalistPlant(count=args.capitalists,
                                          reciprocity=args.reciprocity)
    spec = synth_mod.PlantedSpec(
        community_sizes=sizes,
        p_intra=args.p_intra,
        p_inter=args.p_inter,
        capitalist_plant=plant,
        seed=args.seed,
    )
    g, truth = synth_mod.generate(spec)
    graph_mod.write_edge_list(g, args.edges_out)
    synth_mod.write_ground_truth(g, truth, args.truth_out)
    print(f"ARTIFACT edges {args.edges_out}")
    print(f"ARTIFACT ground_truth {args.truth_out}")


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            _run_synth(args)
        else:
            Pipeline(build_config(args)).run(args.command)
    except RolenetError as exc:
        logger.error("%s", exc)
        return 2
    except Exception:  # internal failure
        logger.exception("internal error")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
