"""Signed directed graphs aggregated from event records.

Two weighted adjacency layers are kept side by side: ``pos`` holds
cooperation ties (ally joins attacker, ally assists target) and ``neg``
holds attack ties. All stored weights are non-negative; the sign lives in
the layer split.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional

import numpy as np

from ._validation import check_positive
from .errors import MissingPrincipal, SchemaMismatch
from .ingest import (
    DEFAULT_FALLBACK_CATEGORY,
    ActorCatalog,
    EventRecord,
    SCHEMA_VERSION,
)

POSITIVE = "positive"
NEGATIVE = "negative"


class TieMode(Enum):
    """How attack ties are read off an incident.

    The source convention names only the attacker's ally as the origin of an
    attack tie, which leaves two-actor incidents tie-less; FULL also draws
    attacker-to-target (and attacker/ally to secondary target) ties, which is
    what a dense attack network requires. PAPER_LITERAL keeps the narrow rule
    for fidelity experiments.
    """

    PAPER_LITERAL = "paper_literal"
    FULL = "full"


class WeightScheme(Enum):
    INCIDENT_COUNT = "incident_count"
    FATALITY_WEIGHTED = "fatality_weighted"


@dataclass(frozen=True)
class Tie:
    source: str
    target: str
    sign: str  # POSITIVE or NEGATIVE
    weight: float = 1.0

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError("self-ties are not allowed")
        if self.sign not in (POSITIVE, NEGATIVE):
            raise ValueError(f"bad sign {self.sign!r}")
        check_positive(self.weight, "weight")


@dataclass(frozen=True)
class Node:
    id: str
    category: str


class SignedDiGraph:
    """Immutable signed directed graph on a fixed, recorded node order."""

    def __init__(self, nodes: Iterable[Node], pos: np.ndarray, neg: np.ndarray):
        self.nodes = list(nodes)
        n = len(self.nodes)
        self.pos = np.asarray(pos, dtype=float).reshape(n, n)
        self.neg = np.asarray(neg, dtype=float).reshape(n, n)
        for name, layer in (("pos", self.pos), ("neg", self.neg)):
            if layer.size and np.any(layer < 0):
                raise ValueError(f"{name} layer has negative weights")
            if layer.size and np.any(np.diag(layer) != 0):
                raise ValueError(f"{name} layer has a nonzero diagonal")
        self._index = {node.id: i for i, node in enumerate(self.nodes)}
        if len(self._index) != n:
            raise ValueError("duplicate node ids")
        self.pos.setflags(write=False)
        self.neg.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def node_ids(self) -> list[str]:
        return [node.id for node in self.nodes]

    def index_of(self, actor_id: str) -> int:
        return self._index[actor_id]

    def categories(self) -> dict[str, str]:
        return {node.id: node.category for node in self.nodes}

    def layer(self, which: str) -> np.ndarray:
        if which == POSITIVE:
            return self.pos
        if which == NEGATIVE:
            return self.neg
        raise ValueError(f"unknown layer {which!r}")

    def to_json(self, **extra) -> str:
        def edge_list(layer):
            src, dst = np.nonzero(layer)
            edges = [
                [int(i), int(j), float(layer[i, j])] for i, j in zip(src, dst)
            ]
            edges.sort(key=lambda e: (e[0], e[1]))
            return edges

        doc = dict(extra)
        doc.update(
            {
                "schema_version": SCHEMA_VERSION,
                "nodes": [
                    {"id": node.id, "category": node.category} for node in self.nodes
                ],
                "pos_edges": edge_list(self.pos),
                "neg_edges": edge_list(self.neg),
            }
        )
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SignedDiGraph":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise SchemaMismatch(
                f"graph schema_version {doc.get('schema_version')!r}, "
                f"expected {SCHEMA_VERSION!r}"
            )
        nodes = [Node(d["id"], d["category"]) for d in doc["nodes"]]
        n = len(nodes)
        pos = np.zeros((n, n))
        neg = np.zeros((n, n))
        for layer, edges in ((pos, doc["pos_edges"]), (neg, doc["neg_edges"])):
            for i, j, w in edges:
                layer[i, j] = w
        return cls(nodes, pos, neg)


def extract_ties(event: EventRecord, mode: TieMode = TieMode.FULL) -> list[Tie]:
    """Unit-weight ties read off one incident.

    Cooperation always runs ally-to-principal: actor_b -> actor_a and
    actor_d -> actor_c. Attack ties depend on the mode (see TieMode).
    Self-loops produced by canonicalization collapses are dropped.
    """
    a, b, c, d = event.actor_a, event.actor_b, event.actor_c, event.actor_d
    if not a or not c:
        raise MissingPrincipal(f"event {event.id} lacks an attacker or a target")

    pairs: list[tuple[str, str, str]] = []
    if b:
        pairs.append((b, a, POSITIVE))
    if d:
        pairs.append((d, c, POSITIVE))
    if mode is TieMode.FULL:
        pairs.append((a, c, NEGATIVE))
        if b:
            pairs.append((b, c, NEGATIVE))
        if d:
            pairs.append((a, d, NEGATIVE))
            if b:
                pairs.append((b, d, NEGATIVE))
    else:
        if b:
            pairs.append((b, c, NEGATIVE))
    return [Tie(s, t, sign) for s, t, sign in pairs if s != t]


def build_graph(
    events: Iterable[EventRecord],
    mode: TieMode = TieMode.FULL,
    scheme: WeightScheme = WeightScheme.INCIDENT_COUNT,
    catalog: Optional[ActorCatalog] = None,
    fallback_category: str = DEFAULT_FALLBACK_CATEGORY,
) -> SignedDiGraph:
    """Aggregate events into a signed directed graph.

    Each (source, target, sign) weight is the number of generating incidents,
    or the sum of their fatality counts under FATALITY_WEIGHTED. Only actors
    appearing in some tie become nodes (isolates are left out); node order is
    sorted by id so the result does not depend on event order. Events lacking
    an attacker or a target contribute nothing.
    """
    weights: dict[tuple[str, str, str], float] = {}
    for event in events:
        if not event.actor_a or not event.actor_c:
            continue
        increment = (
            float(event.fatalities)
            if scheme is WeightScheme.FATALITY_WEIGHTED
            else 1.0
        )
        for tie in extract_ties(event, mode):
            key = (tie.source, tie.target, tie.sign)
            weights[key] = weights.get(key, 0.0) + increment

    ids = sorted({s for s, _, _ in weights} | {t for _, t, _ in weights})
    index = {actor: i for i, actor in enumerate(ids)}
    n = len(ids)
    pos = np.zeros((n, n))
    neg = np.zeros((n, n))
    for (s, t, sign), w in weights.items():
        layer = pos if sign == POSITIVE else neg
        layer[index[s], index[t]] = w

    def category(actor):
        if catalog is not None:
            return catalog.category_of(actor)
        return fallback_category

    return SignedDiGraph([Node(a, category(a)) for a in ids], pos, neg)


def subgraph(g: SignedDiGraph, keep: Callable[[Node], bool]) -> SignedDiGraph:
    """Induced subgraph on the nodes satisfying ``keep``; order preserved."""
    idx = [i for i, node in enumerate(g.nodes) if keep(node)]
    sel = np.ix_(idx, idx)
    return SignedDiGraph(
        [g.nodes[i] for i in idx], g.pos[sel].copy(), g.neg[sel].copy()
    )


def symmetrize(g: SignedDiGraph) -> np.ndarray:
    """Net signed symmetric matrix (P + Pt)/2 - (N + Nt)/2.

    A pair with both cooperation and attack history nets out; the raw layers
    stay available on the graph for per-layer statistics.
    """
    return (g.pos + g.pos.T) / 2.0 - (g.neg + g.neg.T) / 2.0


def split_id(actor_id: str, role: str) -> str:
    """Name of the out- or in-role copy of a node in the expanded matrix."""
    return f"{actor_id}::{role}"


def directed_expand(
    g: SignedDiGraph, coupling: float = 1.0
) -> tuple[np.ndarray, list[str]]:
    """Symmetric signed matrix over out/in copies of every node.

    Each directed tie u -> v of signed weight w becomes the symmetric entry
    (u_out, v_in) = w, and each node's two copies are linked with positive
    weight ``coupling`` times its total absolute degree, so the copies stay
    near each other in any embedding. Returns the 2n x 2n matrix and the
    split node ids (all out roles first, then all in roles).
    """
    check_positive(coupling, "coupling")
    n = g.n
    signed = g.pos - g.neg
    absdeg = np.abs(signed).sum(axis=1) + np.abs(signed).sum(axis=0)
    block = signed + np.diag(coupling * absdeg)
    expanded = np.zeros((2 * n, 2 * n))
    expanded[:n, n:] = block
    expanded[n:, :n] = block.T
    ids = [split_id(v, "out") for v in g.node_ids] + [
        split_id(v, "in") for v in g.node_ids
    ]
    return expanded, ids
