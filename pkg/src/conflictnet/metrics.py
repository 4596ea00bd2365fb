"""Per-layer network statistics.

Attack and cooperation layers are analyzed separately. Unless a weighted
view is requested, every statistic runs on the unweighted undirected
collapse of one layer: a dyad counts as tied when either direction carries
weight. Node sets are restricted to the layer's participants, i.e. nodes
with at least one tie there, mirroring plots that leave isolates out.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._validation import check_symmetric
from .errors import DegenerateGraph, NoConvergence, NoTies
from .graph import NEGATIVE, POSITIVE, SignedDiGraph

UNDIRECTED_UNWEIGHTED = "undirected_unweighted"
UNDIRECTED_WEIGHTED = "undirected_weighted"


@dataclass(frozen=True)
class LayerView:
    """Which sign layer to analyze and how to collapse it."""

    which: str  # POSITIVE or NEGATIVE
    treat_as: str = UNDIRECTED_UNWEIGHTED

    def __post_init__(self):
        if self.which not in (POSITIVE, NEGATIVE):
            raise ValueError(f"unknown layer {self.which!r}")
        if self.treat_as not in (UNDIRECTED_UNWEIGHTED, UNDIRECTED_WEIGHTED):
            raise ValueError(f"unknown view {self.treat_as!r}")


def _as_view(layer) -> LayerView:
    if isinstance(layer, LayerView):
        return layer
    return LayerView(layer)


@dataclass
class MetricReport:
    per_node: dict[str, float]
    mean: float = field(init=False)
    std_dev: float = field(init=False)

    def __post_init__(self):
        values = np.array(list(self.per_node.values()), dtype=float)
        self.mean = float(values.mean()) if values.size else 0.0
        self.std_dev = float(values.std()) if values.size else 0.0

    def to_csv(self, value_name: str = "value") -> str:
        """Rows sorted by value descending then actor id, with footer stats."""
        lines = [f"actor,{value_name}"]
        for actor, value in sorted(self.per_node.items(), key=lambda kv: (-kv[1], kv[0])):
            lines.append(f"{actor},{value!r}")
        lines.append(f"mean,{self.mean!r}")
        lines.append(f"std_dev,{self.std_dev!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EIResult:
    index: float
    p_value: float
    permutations: int
    seed: int


@dataclass(frozen=True)
class TriadCensus:
    """Counts of fully connected signed triples by number of negative edges."""

    ppp: int
    ppn: int
    pnn: int
    nnn: int

    @property
    def total(self) -> int:
        return self.ppp + self.ppn + self.pnn + self.nnn

    @property
    def balanced_fraction(self) -> float:
        # Balanced classes carry an even number of negative edges.
        return (self.ppp + self.pnn) / self.total if self.total else 0.0


@dataclass(frozen=True)
class TransitivityReport:
    closed_negative_fraction: float
    closed_positive_fraction: float
    open_fraction: float


def _collapse(g: SignedDiGraph, view: LayerView):
    """Participating node ids plus their symmetric collapsed adjacency."""
    layer = g.layer(view.which)
    sym = layer + layer.T
    participating = np.flatnonzero(sym.sum(axis=0) > 0)
    ids = [g.nodes[i].id for i in participating]
    sub = sym[np.ix_(participating, participating)]
    if view.treat_as == UNDIRECTED_UNWEIGHTED:
        sub = (sub > 0).astype(float)
    return ids, sub


def degree_centrality(g: SignedDiGraph, layer) -> MetricReport:
    """Distinct-neighbor count over n - 1, per participating node."""
    view = _as_view(layer)
    ids, adj = _collapse(g, view)
    n = len(ids)
    if n < 2:
        raise DegenerateGraph(f"{view.which} layer has {n} participating node(s)")
    if view.treat_as == UNDIRECTED_WEIGHTED:
        scores = adj.sum(axis=1) / (n - 1)
    else:
        scores = (adj > 0).sum(axis=1) / (n - 1)
    return MetricReport({a: float(s) for a, s in zip(ids, scores)})


def _components(adj: np.ndarray) -> list[list[int]]:
    n = adj.shape[0]
    seen = [False] * n
    components = []
    for start in range(n):
        if seen[start]:
            continue
        stack, comp = [start], []
        seen[start] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in np.flatnonzero(adj[v]):
                if not seen[u]:
                    seen[u] = True
                    stack.append(int(u))
        components.append(sorted(comp))
    return components


def eigenvector_centrality(
    g: SignedDiGraph, layer, tol: float = 1e-12, max_iter: int = 100_000
) -> MetricReport:
    """Principal-eigenvector scores on the largest connected component.

    Power iteration runs on A + I (the shift makes the dominant eigenvalue
    strict even for bipartite components) until the residual of the original
    adjacency drops to ``tol``. The full report vector has unit Euclidean
    norm and non-negative entries; nodes outside the largest component score
    zero. Components of equal size tie-break to the one seen first in node
    order.
    """
    view = _as_view(layer)
    ids, adj = _collapse(g, view)
    if not ids:
        raise NoTies(f"{view.which} layer is empty")
    components = _components(adj)
    lcc = max(components, key=len)  # max() keeps the earliest of equal sizes
    sub = adj[np.ix_(lcc, lcc)]

    m = len(lcc)
    x = np.full(m, 1.0 / np.sqrt(m))
    for _ in range(max_iter):
        y = sub @ x + x
        x = y / np.linalg.norm(y)
        lam = float(x @ (sub @ x))
        if np.linalg.norm(sub @ x - lam * x) <= tol:
            break
    else:
        raise NoConvergence(f"power iteration did not reach {tol} in {max_iter} steps")

    full = np.zeros(len(ids))
    full[lcc] = np.abs(x)
    full /= np.linalg.norm(full)
    return MetricReport({a: float(s) for a, s in zip(ids, full)})


def betweenness_centrality(g: SignedDiGraph, layer) -> MetricReport:
    """Shortest-path betweenness via single-source dependency accumulation,
    on the unweighted collapse, normalized by (n-1)(n-2)/2."""
    view = _as_view(layer)
    ids, adj = _collapse(g, LayerView(view.which))  # betweenness is unweighted
    if not ids:
        raise NoTies(f"{view.which} layer is empty")
    n = len(ids)
    neighbors = [list(map(int, np.flatnonzero(adj[v]))) for v in range(n)]
    score = np.zeros(n)
    for s in range(n):
        # BFS with path counts
        dist = [-1] * n
        sigma = [0.0] * n
        preds: list[list[int]] = [[] for _ in range(n)]
        dist[s], sigma[s] = 0, 1.0
        order = [s]
        queue = [s]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            for w in neighbors[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                    order.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                score[w] += delta[w]
    score /= 2.0  # each unordered pair was accumulated from both endpoints
    denom = (n - 1) * (n - 2) / 2.0
    if denom > 0:
        score /= denom
    return MetricReport({a: float(s) for a, s in zip(ids, score)})


def density(g: SignedDiGraph, layer) -> float:
    """Tied dyads over all dyads among participating nodes."""
    view = _as_view(layer)
    ids, adj = _collapse(g, LayerView(view.which))
    n = len(ids)
    if n < 2:
        raise DegenerateGraph(f"{view.which} layer has {n} participating node(s)")
    ties = np.count_nonzero(np.triu(adj, 1))
    return ties / (n * (n - 1) / 2.0)


def clustering_coefficient(g: SignedDiGraph, layer) -> float:
    """Global transitivity: 3 x triangles / connected triples."""
    view = _as_view(layer)
    ids, adj = _collapse(g, LayerView(view.which))
    n = len(ids)
    if n < 3:
        raise DegenerateGraph(f"{view.which} layer has {n} participating node(s)")
    triangles = np.trace(adj @ adj @ adj) / 6.0
    deg = adj.sum(axis=1)
    triples = float((deg * (deg - 1) / 2.0).sum())
    return 3.0 * triangles / triples if triples else 0.0


def signed_transitivity(g: SignedDiGraph) -> TransitivityReport:
    """How two-paths of attack ties close.

    Over all undirected two-paths u - v - w whose both ties are negative,
    the closing u - w dyad is classified negative, positive, or absent
    (negative wins when a dyad carries both signs). The closed fractions are
    shares of closed paths; the open fraction is the absent share of all
    such two-paths.
    """
    neg = g.neg + g.neg.T > 0
    pos = g.pos + g.pos.T > 0
    if not neg.any():
        raise NoTies("negative layer is empty")
    n = g.n
    closed_neg = closed_pos = absent = 0
    for v in range(n):
        nbrs = np.flatnonzero(neg[v])
        for a in range(len(nbrs)):
            for b in range(a + 1, len(nbrs)):
                u, w = nbrs[a], nbrs[b]
                if neg[u, w]:
                    closed_neg += 1
                elif pos[u, w]:
                    closed_pos += 1
                else:
                    absent += 1
    total = closed_neg + closed_pos + absent
    closed = closed_neg + closed_pos
    return TransitivityReport(
        closed_negative_fraction=closed_neg / closed if closed else 0.0,
        closed_positive_fraction=closed_pos / closed if closed else 0.0,
        open_fraction=absent / total if total else 0.0,
    )


def _ei_counts(codes: np.ndarray, src: np.ndarray, dst: np.ndarray) -> float:
    external = int(np.count_nonzero(codes[src] != codes[dst]))
    m = len(src)
    return (2 * external - m) / m


def ei_index(
    g: SignedDiGraph,
    layer,
    categories: Optional[dict[str, str]] = None,
    permutations: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> EIResult:
    """External-minus-internal tie share across node categories.

    The p-value is the fraction of category-label shuffles whose index is at
    least the observed one. All permutations are drawn up front from the
    seeded generator, so the result is identical for any worker count.
    """
    view = _as_view(layer)
    ids, adj = _collapse(g, LayerView(view.which))
    src, dst = np.nonzero(np.triu(adj, 1))
    if len(src) == 0:
        raise NoTies(f"{view.which} layer has no ties")
    if permutations < 1:
        raise ValueError("permutations must be >= 1")

    cats = categories if categories is not None else g.categories()
    labels = [cats[a] for a in ids]
    coding = {c: k for k, c in enumerate(sorted(set(labels)))}
    codes = np.array([coding[c] for c in labels])

    observed = _ei_counts(codes, src, dst)

    rng = np.random.default_rng(seed)
    perms = np.array([rng.permutation(len(ids)) for _ in range(permutations)])

    def count_chunk(chunk: np.ndarray) -> int:
        shuffled = codes[chunk]  # (chunk, n)
        external = (shuffled[:, src] != shuffled[:, dst]).sum(axis=1)
        m = len(src)
        indices = (2 * external - m) / m
        return int(np.count_nonzero(indices >= observed - 1e-12))

    if workers <= 1:
        hits = count_chunk(perms)
    else:
        chunks = np.array_split(perms, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(count_chunk, chunks))

    return EIResult(
        index=observed,
        p_value=hits / permutations,
        permutations=permutations,
        seed=seed,
    )


def triad_census(W: np.ndarray) -> TriadCensus:
    """Census of fully connected triples in a signed symmetric matrix."""
    W = check_symmetric(W)
    pos = (W > 0).astype(float)
    neg = (W < 0).astype(float)
    ppp = np.trace(pos @ pos @ pos) / 6.0
    nnn = np.trace(neg @ neg @ neg) / 6.0
    # Mixed products count each triangle twice (orientation only).
    ppn = np.trace(pos @ pos @ neg) / 2.0
    pnn = np.trace(pos @ neg @ neg) / 2.0
    return TriadCensus(int(round(ppp)), int(round(ppn)), int(round(pnn)), int(round(nnn)))
