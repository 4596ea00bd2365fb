"""Spectral embedding of signed networks and aggression scores.

The signed Laplacian L = Dbar - W uses absolute-degree diagonals, so it
stays positive semidefinite when W carries negative entries. Embedding
coordinates are the eigenvectors of the smallest non-trivial eigenvalues;
allied nodes land close together and antagonists are pushed apart.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._validation import check_symmetric, check_zero_diagonal
from .errors import (
    DimensionTooLarge,
    EigFailure,
    EmptyAfterIsolateRemoval,
    MissingNode,
)
from .graph import SignedDiGraph, directed_expand, split_id, symmetrize

GREEN = "green"
ORANGE = "orange"
RED = "red"

_SIGN_EPS = 1e-12
_CONSTANT_EPS = 1e-9


@dataclass(frozen=True)
class SignedLaplacian:
    matrix: np.ndarray
    node_order: list[str]
    normalized: bool
    dropped: list[str]


@dataclass(frozen=True)
class Embedding:
    coords: np.ndarray  # (n, k)
    eigenvalues: np.ndarray  # (k,)
    node_order: list[str]

    @property
    def k(self) -> int:
        return self.coords.shape[1]

    def position(self, node_id: str) -> np.ndarray:
        try:
            return self.coords[self.node_order.index(node_id)]
        except ValueError:
            raise MissingNode(f"{node_id!r} is not embedded") from None

    def distance(self, a: str, b: str) -> float:
        return float(np.linalg.norm(self.position(a) - self.position(b)))


@dataclass(frozen=True)
class AggressionScore:
    actor: str
    out_aggression: float
    in_aggression: float
    net_aggression: float
    label: str


def eigh_ascending(M: np.ndarray, residual_tol: float = 1e-8):
    """Full symmetric eigendecomposition, ascending, with fixed vector signs.

    Each eigenvector is flipped so its first entry of magnitude above 1e-12
    is positive, and residuals ||Mv - lam v|| are checked against the given
    tolerance so a silently bad decomposition cannot propagate.
    """
    M = check_symmetric(M)
    try:
        eigenvalues, vectors = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise EigFailure(str(exc)) from exc
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        big = np.flatnonzero(np.abs(col) > _SIGN_EPS)
        if big.size and col[big[0]] < 0:
            vectors[:, j] = -col
    residual = M @ vectors - vectors * eigenvalues
    worst = float(np.abs(residual).max(initial=0.0))
    scale = max(1.0, float(np.abs(eigenvalues).max(initial=0.0)))
    if worst > residual_tol * scale:
        raise EigFailure(f"residual {worst:.3e} exceeds tolerance")
    return eigenvalues, vectors


def signed_laplacian(
    W: np.ndarray,
    node_ids: Optional[Sequence[str]] = None,
    normalized: bool = True,
) -> SignedLaplacian:
    """L = Dbar - W with Dbar_ii = sum_j |W_ij|, isolates removed first.

    Nodes whose absolute degree is zero contribute nothing and would make
    the normalized form undefined, so they are dropped and recorded.
    """
    W = check_zero_diagonal(check_symmetric(W))
    ids = list(node_ids) if node_ids is not None else [str(i) for i in range(W.shape[0])]
    if len(ids) != W.shape[0]:
        raise ValueError(f"{len(ids)} ids for a {W.shape[0]}-node matrix")

    absdeg = np.abs(W).sum(axis=1)
    keep = absdeg > 0
    dropped = [a for a, k in zip(ids, keep) if not k]
    if not keep.any():
        raise EmptyAfterIsolateRemoval("all nodes are isolates")

    sub = W[np.ix_(keep, keep)]
    deg = absdeg[keep]
    L = np.diag(deg) - sub
    if normalized:
        inv_sqrt = 1.0 / np.sqrt(deg)
        L = inv_sqrt[:, None] * L * inv_sqrt[None, :]
        L = (L + L.T) / 2.0  # scaling can leave last-bit asymmetry
    return SignedLaplacian(
        matrix=L,
        node_order=[a for a, k in zip(ids, keep) if k],
        normalized=normalized,
        dropped=dropped,
    )


def embed(L: SignedLaplacian, k: int = 2) -> Embedding:
    """Coordinates from the k smallest informative eigenvectors.

    Numerically constant eigenvectors (spread below 1e-9 of the column
    norm) carry no layout information and are skipped.
    """
    n = L.matrix.shape[0]
    if k < 1 or k > max(n - 1, 0):
        raise DimensionTooLarge(f"k={k} with {n} embeddable nodes")
    eigenvalues, vectors = eigh_ascending(L.matrix)
    chosen = []
    for j in range(n):
        col = vectors[:, j]
        spread = float(col.max() - col.min())
        if spread < _CONSTANT_EPS * float(np.linalg.norm(col)):
            continue
        chosen.append(j)
        if len(chosen) == k:
            break
    if len(chosen) < k:
        raise DimensionTooLarge(
            f"k={k} but only {len(chosen)} non-constant eigenvectors exist"
        )
    return Embedding(
        coords=vectors[:, chosen].copy(),
        eigenvalues=eigenvalues[chosen].copy(),
        node_order=list(L.node_order),
    )


def embed_graph(g: SignedDiGraph, k: int = 2, normalized: bool = True) -> Embedding:
    """Symmetrize the graph, build its Laplacian, and embed."""
    W = symmetrize(g)
    return embed(signed_laplacian(W, g.node_ids, normalized=normalized), k=k)


def embed_directed(
    g: SignedDiGraph, k: int = 2, coupling: float = 1.0, normalized: bool = True
) -> Embedding:
    """Embed with direction kept, via out/in node splitting."""
    X, ids = directed_expand(g, coupling=coupling)
    return embed(signed_laplacian(X, ids, normalized=normalized), k=k)


def classify(out_aggression: float, in_aggression: float, epsilon: float = 1e-9) -> str:
    """Green: no outgoing attacks. Red: attacks more than attacked. Orange: rest."""
    if out_aggression <= epsilon:
        return GREEN
    if out_aggression - in_aggression > epsilon:
        return RED
    return ORANGE


def _role_mode(emb: Embedding, g: SignedDiGraph) -> bool:
    positions = set(emb.node_order)
    if any(v in positions for v in g.node_ids):
        return False
    return True


def aggression_scores(
    emb: Embedding,
    g: SignedDiGraph,
    weighted: bool = True,
    epsilon: float = 1e-9,
) -> list[AggressionScore]:
    """Mean embedded distance along attack ties, out and in, per node.

    Works on plain embeddings and on role-split ones (node ids suffixed
    ::out / ::in), where a tie u -> v is measured between u's out copy and
    v's in copy. Every node of g that has any tie must be embedded; nodes
    with no attack ties in a direction score zero there.
    """
    role = _role_mode(emb, g)
    index = {a: i for i, a in enumerate(emb.node_order)}

    def coords_of(node_id: str, side: str) -> np.ndarray:
        key = split_id(node_id, side) if role else node_id
        try:
            return emb.coords[index[key]]
        except KeyError:
            raise MissingNode(f"{key!r} is not embedded") from None

    tied = np.flatnonzero(
        (g.pos + g.pos.T + g.neg + g.neg.T).sum(axis=0) > 0
    )
    for i in tied:  # enforce coverage before any partial result
        coords_of(g.nodes[i].id, "out")
        coords_of(g.nodes[i].id, "in")

    def side_mean(v: int, outgoing: bool) -> float:
        weights = g.neg[v, :] if outgoing else g.neg[:, v]
        targets = np.flatnonzero(weights)
        if targets.size == 0:
            return 0.0
        here = coords_of(g.nodes[v].id, "out" if outgoing else "in")
        dists = np.array(
            [
                float(
                    np.linalg.norm(
                        here - coords_of(g.nodes[u].id, "in" if outgoing else "out")
                    )
                )
                for u in targets
            ]
        )
        if weighted:
            w = weights[targets]
            return float((dists * w).sum() / w.sum())
        return float(dists.mean())

    scores = []
    for v in range(g.n):
        out_a = side_mean(v, outgoing=True)
        in_a = side_mean(v, outgoing=False)
        scores.append(
            AggressionScore(
                actor=g.nodes[v].id,
                out_aggression=out_a,
                in_aggression=in_a,
                net_aggression=out_a - in_a,
                label=classify(out_a, in_a, epsilon),
            )
        )
    return scores


def embedding_csv(emb: Embedding) -> str:
    header = "actor," + ",".join(f"x{j + 1}" for j in range(emb.k))
    lines = [header]
    for i, actor in enumerate(emb.node_order):
        coords = ",".join(repr(float(c)) for c in emb.coords[i])
        lines.append(f"{actor},{coords}")
    return "\n".join(lines) + "\n"


def scores_csv(scores: list[AggressionScore]) -> str:
    """Rows sorted by net aggression descending, then actor id."""
    lines = ["actor,aggression,outaggression,inaggression,label"]
    ordered = sorted(scores, key=lambda s: (-s.net_aggression, s.actor))
    for s in ordered:
        lines.append(
            f"{s.actor},{s.net_aggression!r},{s.out_aggression!r},"
            f"{s.in_aggression!r},{s.label}"
        )
    return "\n".join(lines) + "\n"


_LABEL_FILL = {GREEN: "#2ca02c", ORANGE: "#ff7f0e", RED: "#d62728"}


def embedding_svg(
    emb: Embedding,
    g: Optional[SignedDiGraph] = None,
    scores: Optional[list[AggressionScore]] = None,
    size: int = 640,
    margin: float = 48.0,
) -> str:
    """Deterministic scatter plot of the first two embedding coordinates.

    Built by string assembly rather than a plotting library so identical
    inputs yield byte-identical files. Attack ties are drawn red, alliance
    ties green; node fill follows the aggression label when scores are
    given.
    """
    xs = emb.coords[:, 0]
    ys = emb.coords[:, 1] if emb.k >= 2 else np.zeros_like(xs)

    def scale(values: np.ndarray) -> np.ndarray:
        lo, hi = float(values.min()), float(values.max())
        span = hi - lo
        if span <= 0:
            return np.full_like(values, size / 2.0)
        return margin + (values - lo) / span * (size - 2 * margin)

    px = scale(xs)
    py = size - scale(ys)  # SVG y runs downward

    index = {a: i for i, a in enumerate(emb.node_order)}
    role = g is not None and _role_mode(emb, g)
    fills = {}
    if scores is not None:
        for s in scores:
            fills[s.actor] = _LABEL_FILL[s.label]

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if g is not None:
        for which, stroke in ((g.pos, "#2ca02c"), (g.neg, "#d62728")):
            for i, j in zip(*np.nonzero(which)):
                a, b = g.nodes[int(i)].id, g.nodes[int(j)].id
                ka = split_id(a, "out") if role else a
                kb = split_id(b, "in") if role else b
                if ka not in index or kb not in index:
                    continue
                parts.append(
                    f'<line x1="{px[index[ka]]:.2f}" y1="{py[index[ka]]:.2f}" '
                    f'x2="{px[index[kb]]:.2f}" y2="{py[index[kb]]:.2f}" '
                    f'stroke="{stroke}" stroke-width="1" stroke-opacity="0.5"/>'
                )
    for actor in emb.node_order:
        i = index[actor]
        base = actor.rsplit("::", 1)[0] if role else actor
        fill = fills.get(base, "#4682b4")
        parts.append(
            f'<circle cx="{px[i]:.2f}" cy="{py[i]:.2f}" r="5" fill="{fill}" '
            f'stroke="black" stroke-width="0.5"><title>{_xml_escape(actor)}</title>'
            "</circle>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _xml_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )
