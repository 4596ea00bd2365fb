"""Command-line pipeline: cnl <stage> --config run.json [overrides].

Stages communicate through files in the output directory, so any stage can
be re-run or audited on its own. Outputs are deterministic: same inputs,
config, and seed give byte-identical artifacts.

Exit codes: 0 ok, 2 config error, 3 unreadable input, 4 pipeline or
schema error (including missing upstream artifacts).
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from . import __version__
from .artifacts import (
    atomic_write_text,
    config_digest,
    dump_json,
    read_json_artifact,
    stamp,
    svg_stamp,
    text_stamp,
)
from .errors import ChainTooShort, ConflictNetError, DegenerateGraph, NoConvergence, NoTies
from .geo import (
    INDETERMINATE,
    BorderSet,
    chain_events,
    export_chain_geojson,
    classify_scenario,
    year_metrics,
    year_metrics_csv,
)
from .graph import (
    NEGATIVE,
    POSITIVE,
    SignedDiGraph,
    TieMode,
    WeightScheme,
    build_graph,
    split_id,
    symmetrize,
)
from .ingest import (
    VIOLENT_TYPES,
    ActorCatalog,
    ColumnMapping,
    EventType,
    events_from_json,
    events_to_json,
    filter_events,
    parse_events,
    row_errors_csv,
)
from .metrics import (
    betweenness_centrality,
    clustering_coefficient,
    degree_centrality,
    density,
    ei_index,
    eigenvector_centrality,
    signed_transitivity,
    triad_census,
)
from .spectral import (
    Embedding,
    aggression_scores,
    embed_directed,
    embed_graph,
    embedding_csv,
    embedding_svg,
    scores_csv,
)

TIE_MODES = ("full", "paper_literal")
WEIGHT_SCHEMES = ("incident_count", "fatality_weighted")


@dataclass
class RunConfig:
    """Everything one pipeline run depends on, loadable from a JSON file."""

    # input and output paths
    csv: Optional[str] = None
    catalog: Optional[str] = None
    mapping: Optional[str] = None
    borders: Optional[str] = None
    out: str = "out"
    # parsing
    date_format: Optional[str] = None
    fallback_category: str = "militias"
    # event filtering (applied by graph and geo stages)
    event_types: Optional[list] = None  # labels; None = all violent types
    scope: Optional[list] = None  # country names
    actors: Optional[list] = None
    date_start: Optional[str] = None
    date_end: Optional[str] = None
    # graph construction
    tie_mode: str = "full"
    weight_scheme: str = "incident_count"
    # embedding
    k: int = 2
    normalized: bool = True
    directed: bool = False
    coupling: float = 1.0
    # aggression
    weighted_aggression: bool = True
    epsilon: float = 1e-9
    # category mixing test
    permutations: int = 10_000
    seed: int = 0
    workers: int = 1
    # chain scenario thresholds
    radius_km: float = 150.0
    concentration_threshold: float = 0.6
    step_threshold_km: float = 300.0

    def validate(self):
        if self.tie_mode not in TIE_MODES:
            raise ValueError(f"tie_mode must be one of {TIE_MODES}")
        if self.weight_scheme not in WEIGHT_SCHEMES:
            raise ValueError(f"weight_scheme must be one of {WEIGHT_SCHEMES}")
        for name in ("k", "permutations", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("coupling", "epsilon", "radius_km", "step_threshold_km"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


# Config fields each stage actually consumes. The digest stamped into a
# stage's artifacts covers only these, so e.g. changing the permutation
# seed leaves graph and embedding artifacts byte-identical (they make
# natural cache keys).
_PARSE_FIELDS = ("date_format", "fallback_category")
_FILTER_FIELDS = ("event_types", "scope", "actors", "date_start", "date_end")
_GRAPH_FIELDS = _PARSE_FIELDS + _FILTER_FIELDS + ("tie_mode", "weight_scheme")
_EMBED_FIELDS = _GRAPH_FIELDS + ("k", "normalized", "directed", "coupling")
_STAGE_FIELDS = {
    "ingest": _PARSE_FIELDS,
    "graph": _GRAPH_FIELDS,
    "metrics": _GRAPH_FIELDS + ("permutations", "seed", "workers"),
    "embed": _EMBED_FIELDS,
    "aggression": _EMBED_FIELDS + ("weighted_aggression", "epsilon"),
    "geo": _PARSE_FIELDS
    + _FILTER_FIELDS
    + ("radius_km", "concentration_threshold", "step_threshold_km"),
    "report": None,  # all non-path fields
}


def stage_digest(cfg: RunConfig, stage: str) -> str:
    payload = asdict(cfg)
    wanted = _STAGE_FIELDS[stage]
    if wanted is not None:
        payload = {k: payload[k] for k in wanted}
    return config_digest(payload)


class ExitError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _read_input(path: str, what: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise ExitError(3, f"cannot read {what} {path!r}: {exc}") from exc


def _read_artifact(path: str) -> dict:
    try:
        return read_json_artifact(path)
    except OSError as exc:
        raise ExitError(4, f"missing artifact {path!r}: run the upstream stage first") from exc


def _out_path(cfg: RunConfig, name: str) -> str:
    return os.path.join(cfg.out, name)


def _write_run_config(cfg: RunConfig):
    doc = stamp({"kind": "run_config", "config": asdict(cfg), "seed": cfg.seed},
                stage_digest(cfg, "report"))
    atomic_write_text(_out_path(cfg, "run_config.json"), dump_json(doc))


def _load_catalog(cfg: RunConfig) -> ActorCatalog:
    if cfg.catalog:
        return ActorCatalog.from_json(_read_input(cfg.catalog, "catalog"))
    return ActorCatalog(fallback_category=cfg.fallback_category)


def _load_mapping(cfg: RunConfig) -> ColumnMapping:
    if cfg.mapping:
        mapping = ColumnMapping.from_json(_read_input(cfg.mapping, "mapping"))
    else:
        mapping = ColumnMapping.acled_v5()
    if cfg.date_format:
        mapping.date_format = cfg.date_format
    return mapping


def _event_types(cfg: RunConfig):
    if cfg.event_types is None:
        return VIOLENT_TYPES
    return frozenset(EventType.from_label(t) for t in cfg.event_types)


def _date_range(cfg: RunConfig):
    if cfg.date_start is None and cfg.date_end is None:
        return None
    start = dt.date.fromisoformat(cfg.date_start) if cfg.date_start else None
    end = dt.date.fromisoformat(cfg.date_end) if cfg.date_end else None
    return (start, end)


def _load_filtered_events(cfg: RunConfig) -> list:
    doc = _read_artifact(_out_path(cfg, "events.json"))
    events = events_from_json(json.dumps(doc))
    return filter_events(
        events,
        types=_event_types(cfg),
        actors=cfg.actors,
        date_range=_date_range(cfg),
        countries=cfg.scope,
    )


def cmd_ingest(cfg: RunConfig) -> int:
    if not cfg.csv:
        raise ExitError(2, "config error: no events CSV given (set 'csv')")
    text = _read_input(cfg.csv, "events CSV")
    catalog = _load_catalog(cfg)
    mapping = _load_mapping(cfg)
    records, errors = parse_events(text, mapping, catalog)

    digest = stage_digest(cfg, "ingest")
    atomic_write_text(
        _out_path(cfg, "events.json"), events_to_json(records, config_digest=digest)
    )
    atomic_write_text(
        _out_path(cfg, "row_errors.csv"), text_stamp(digest) + row_errors_csv(errors)
    )
    _write_run_config(cfg)

    organizations = set()
    for record in records:
        organizations.update(record.actors)
    print(f"{len(records)} events, {len(organizations)} organizations")
    if errors:
        print(f"{len(errors)} rows rejected (see row_errors.csv)")
    return 0


def cmd_graph(cfg: RunConfig) -> int:
    events = _load_filtered_events(cfg)
    catalog = _load_catalog(cfg)
    g = build_graph(
        events,
        mode=TieMode[cfg.tie_mode.upper()],
        scheme=WeightScheme[cfg.weight_scheme.upper()],
        catalog=catalog,
        fallback_category=cfg.fallback_category,
    )
    digest = stage_digest(cfg, "graph")
    atomic_write_text(_out_path(cfg, "graph.json"), g.to_json(config_digest=digest) + "\n")
    _write_run_config(cfg)
    print(f"graph: {g.n} nodes, {int(np.count_nonzero(g.pos))} positive and "
          f"{int(np.count_nonzero(g.neg))} negative ties")
    return 0


def _load_graph(cfg: RunConfig) -> SignedDiGraph:
    doc = _read_artifact(_out_path(cfg, "graph.json"))
    return SignedDiGraph.from_json(json.dumps(doc))


def cmd_metrics(cfg: RunConfig) -> int:
    g = _load_graph(cfg)
    digest = stage_digest(cfg, "metrics")

    csv_files = {}
    summary: dict = {
        "kind": "metrics",
        "permutations": cfg.permutations,
        "seed": cfg.seed,
        "layers": {},
    }
    for layer in (NEGATIVE, POSITIVE):
        block: dict = {}
        for name, fn in (
            ("degree", degree_centrality),
            ("eigenvector", eigenvector_centrality),
            ("betweenness", betweenness_centrality),
        ):
            try:
                report = fn(g, layer)
            except (DegenerateGraph, NoTies, NoConvergence) as exc:
                block[name] = {"skipped": f"{type(exc).__name__}: {exc}"}
                continue
            csv_files[f"{name}_{layer}.csv"] = report.to_csv(name)
            block[name] = {"mean": report.mean, "std_dev": report.std_dev}
        for name, fn in (("density", density), ("clustering", clustering_coefficient)):
            try:
                block[name] = fn(g, layer)
            except (DegenerateGraph, NoTies) as exc:
                block[name] = None
                block[f"{name}_skipped"] = f"{type(exc).__name__}: {exc}"
        try:
            ei = ei_index(
                g,
                layer,
                permutations=cfg.permutations,
                seed=cfg.seed,
                workers=cfg.workers,
            )
            block["ei"] = {
                "index": ei.index,
                "p_value": ei.p_value,
                "permutations": ei.permutations,
                "seed": ei.seed,
            }
        except NoTies as exc:
            block["ei"] = None
            block["ei_skipped"] = f"{type(exc).__name__}: {exc}"
        summary["layers"][layer] = block

    try:
        trans = signed_transitivity(g)
        summary["signed_transitivity"] = {
            "closed_negative_fraction": trans.closed_negative_fraction,
            "closed_positive_fraction": trans.closed_positive_fraction,
            "open_fraction": trans.open_fraction,
        }
    except NoTies as exc:
        summary["signed_transitivity"] = None
        summary["signed_transitivity_skipped"] = f"{type(exc).__name__}: {exc}"

    census = triad_census(symmetrize(g))
    summary["triads"] = {
        "ppp": census.ppp,
        "ppn": census.ppn,
        "pnn": census.pnn,
        "nnn": census.nnn,
        "balanced_fraction": census.balanced_fraction,
    }

    # The centrality tables depend on the graph fields alone, so they are
    # stamped with that narrower digest; only metrics.json (which embeds
    # the permutation test) carries the seed-bearing one.
    table_digest = stage_digest(cfg, "graph")
    for name, text in csv_files.items():
        atomic_write_text(_out_path(cfg, name), text_stamp(table_digest) + text)
    atomic_write_text(_out_path(cfg, "metrics.json"), dump_json(stamp(summary, digest)))
    _write_run_config(cfg)
    print(f"metrics: {len(csv_files)} centrality tables + metrics.json")
    return 0


def _embed(cfg: RunConfig, g: SignedDiGraph) -> Embedding:
    if cfg.directed:
        return embed_directed(g, k=cfg.k, coupling=cfg.coupling, normalized=cfg.normalized)
    return embed_graph(g, k=cfg.k, normalized=cfg.normalized)


def cmd_embed(cfg: RunConfig) -> int:
    g = _load_graph(cfg)
    emb = _embed(cfg, g)
    digest = stage_digest(cfg, "embed")

    expected = (
        [split_id(v, role) for v in g.node_ids for role in ("out", "in")]
        if cfg.directed
        else g.node_ids
    )
    dropped = sorted(set(expected) - set(emb.node_order))
    doc = stamp(
        {
            "kind": "embedding",
            "k": cfg.k,
            "normalized": cfg.normalized,
            "directed": cfg.directed,
            "coupling": cfg.coupling,
            "node_order": list(emb.node_order),
            "eigenvalues": [float(v) for v in emb.eigenvalues],
            "coords": [[float(x) for x in row] for row in emb.coords],
            "dropped": dropped,
        },
        digest,
    )
    atomic_write_text(_out_path(cfg, "embedding.json"), dump_json(doc))
    atomic_write_text(
        _out_path(cfg, "embedding.csv"), text_stamp(digest) + embedding_csv(emb)
    )
    atomic_write_text(
        _out_path(cfg, "embedding.svg"), svg_stamp(digest) + embedding_svg(emb, g)
    )
    _write_run_config(cfg)
    print(f"embedding: {len(emb.node_order)} nodes in {emb.k} dimensions")
    return 0


def _load_embedding(cfg: RunConfig) -> Embedding:
    doc = _read_artifact(_out_path(cfg, "embedding.json"))
    return Embedding(
        coords=np.asarray(doc["coords"], dtype=float),
        eigenvalues=np.asarray(doc["eigenvalues"], dtype=float),
        node_order=list(doc["node_order"]),
    )


def cmd_aggression(cfg: RunConfig) -> int:
    g = _load_graph(cfg)
    emb = _load_embedding(cfg)
    scores = aggression_scores(
        emb, g, weighted=cfg.weighted_aggression, epsilon=cfg.epsilon
    )
    digest = stage_digest(cfg, "aggression")
    atomic_write_text(
        _out_path(cfg, "aggression.csv"), text_stamp(digest) + scores_csv(scores)
    )
    atomic_write_text(
        _out_path(cfg, "aggression.svg"),
        svg_stamp(digest) + embedding_svg(emb, g, scores),
    )
    _write_run_config(cfg)
    reds = sum(1 for s in scores if s.label == "red")
    print(f"aggression: {len(scores)} actors scored, {reds} red")
    return 0


def cmd_geo(cfg: RunConfig) -> int:
    events = _load_filtered_events(cfg)
    borders = None
    if cfg.borders:
        borders = BorderSet.from_geojson(_read_input(cfg.borders, "borders"))
    chain = chain_events(events)
    rows = year_metrics(chain, borders)

    try:
        verdict = classify_scenario(
            chain,
            radius_km=cfg.radius_km,
            concentration_threshold=cfg.concentration_threshold,
            step_threshold_km=cfg.step_threshold_km,
        )
        scenario = {
            "label": verdict.label,
            "medoid": {
                "latitude": verdict.medoid.latitude,
                "longitude": verdict.medoid.longitude,
            },
            "concentration": verdict.concentration,
            "mean_step_km": verdict.mean_step_km,
            "country_crossings": verdict.country_crossings,
        }
    except ChainTooShort as exc:
        scenario = {"label": INDETERMINATE, "reason": str(exc)}
    scenario.update(
        {
            "kind": "scenario",
            "n_located": len(chain.events),
            "n_unlocated": chain.n_unlocated,
            "radius_km": cfg.radius_km,
            "concentration_threshold": cfg.concentration_threshold,
            "step_threshold_km": cfg.step_threshold_km,
        }
    )

    digest = stage_digest(cfg, "geo")
    geojson = json.loads(export_chain_geojson(chain))
    atomic_write_text(_out_path(cfg, "years.csv"), text_stamp(digest) + year_metrics_csv(rows))
    atomic_write_text(_out_path(cfg, "chain.geojson"), dump_json(stamp(geojson, digest)))
    atomic_write_text(_out_path(cfg, "scenario.json"), dump_json(stamp(scenario, digest)))
    _write_run_config(cfg)
    print(f"geo: {len(rows)} year rows, scenario {scenario['label']}")
    return 0


_REPORT_CORE = (
    "events.json",
    "row_errors.csv",
    "graph.json",
    "metrics.json",
    "embedding.json",
    "embedding.csv",
    "embedding.svg",
    "aggression.csv",
    "years.csv",
    "chain.geojson",
    "scenario.json",
)


def cmd_report(cfg: RunConfig) -> int:
    import hashlib

    for name in _REPORT_CORE:
        if not os.path.exists(_out_path(cfg, name)):
            raise ExitError(4, f"missing artifact {name!r}: run the upstream stage first")

    artifacts = {}
    for name in sorted(os.listdir(cfg.out)):
        if name in ("report.json", "run_config.json"):
            continue
        ext = os.path.splitext(name)[1]
        if ext not in (".json", ".csv", ".svg", ".geojson"):
            continue
        path = _out_path(cfg, name)
        with open(path, "rb") as handle:
            raw = handle.read()
        entry = {"sha256": hashlib.sha256(raw).hexdigest()}
        if ext in (".json", ".geojson"):
            entry["content"] = json.loads(raw.decode("utf-8"))
        else:
            entry["content"] = raw.decode("utf-8")
        artifacts[name] = entry

    digest = stage_digest(cfg, "report")
    doc = stamp(
        {
            "kind": "report",
            "tool_version": __version__,
            "seed": cfg.seed,
            "config": asdict(cfg),
            "artifacts": artifacts,
        },
        digest,
    )
    atomic_write_text(_out_path(cfg, "report.json"), dump_json(doc))
    print(f"report: merged {len(artifacts)} artifacts")
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "graph": cmd_graph,
    "metrics": cmd_metrics,
    "embed": cmd_embed,
    "aggression": cmd_aggression,
    "geo": cmd_geo,
    "report": cmd_report,
}

_HELP = {
    "ingest": "parse the events CSV into a normalized events artifact",
    "graph": "build the signed directed graph from ingested events",
    "metrics": "per-layer centralities, density, mixing and triad statistics",
    "embed": "spectral embedding of the signed graph (CSV + SVG)",
    "aggression": "score each actor's attack posture from the embedding",
    "geo": "chronological event chain, per-year movement table, scenario",
    "report": "merge all artifacts into one audit-ready JSON document",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cnl",
        description="Signed-network and event-chain analysis of conflict event data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in _HELP.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="JSON run-config file")
        sp.add_argument("--tie-mode", choices=TIE_MODES, dest="tie_mode")
        sp.add_argument("--k", type=int, help="embedding dimension")
        sp.add_argument("--seed", type=int, help="permutation-test seed")
        sp.add_argument("--permutations", type=int)
        sp.add_argument(
            "--scope",
            action="append",
            metavar="COUNTRY",
            help="restrict to a country (repeatable)",
        )
        sp.add_argument("--out", help="output directory")
    return parser


_KNOWN_FIELDS = {f.name for f in fields(RunConfig)}


def load_config(args: argparse.Namespace) -> RunConfig:
    data = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise ExitError(2, f"config error: {exc}") from exc
    if not isinstance(data, dict):
        raise ExitError(2, "config error: config file must hold a JSON object")
    unknown = set(data) - _KNOWN_FIELDS
    if unknown:
        raise ExitError(2, f"config error: unknown keys {sorted(unknown)}")
    cfg = RunConfig(**data)

    for name in ("tie_mode", "k", "seed", "permutations", "scope", "out"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "out", None) is None and os.environ.get("CNL_OUT"):
        cfg.out = os.environ["CNL_OUT"]

    try:
        cfg.validate()
    except ValueError as exc:
        raise ExitError(2, f"config error: {exc}") from exc
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return _COMMANDS[args.command](cfg)
    except ExitError as exc:
        print(exc.message, file=sys.stderr)
        return exc.code
    except ConflictNetError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
