"""Estimator-style wrappers around the spectral pipeline.

These follow the scikit-learn convention (constructor params, fit,
fit_transform / fit_predict, trailing-underscore attributes) so the
embedding can sit in the same workflows as sklearn's manifold learners.
The functional API in ``spectral`` stays the primary route; these wrappers
add no behavior of their own.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .graph import SignedDiGraph
from .spectral import (
    aggression_scores,
    embed,
    embed_directed,
    embed_graph,
    signed_laplacian,
)


def _embed_input(X, n_components, normalized, directed, coupling):
    if isinstance(X, SignedDiGraph):
        if directed:
            return embed_directed(
                X, k=n_components, coupling=coupling, normalized=normalized
            )
        return embed_graph(X, k=n_components, normalized=normalized)
    W = np.asarray(X, dtype=float)
    L = signed_laplacian(W, normalized=normalized)
    return embed(L, k=n_components)


class SignedSpectralEmbedding(BaseEstimator):
    """Spectral coordinates for a signed graph or signed symmetric matrix.

    Parameters
    ----------
    n_components : target dimension (k smallest informative eigenvectors).
    normalized : use the degree-normalized signed Laplacian.
    directed : split nodes into out/in roles before embedding (graph input
        only; matrices are taken as already symmetric).
    coupling : weight factor tying a node's two roles together when
        ``directed`` is set.
    """

    def __init__(self, n_components=2, normalized=True, directed=False, coupling=1.0):
        self.n_components = n_components
        self.normalized = normalized
        self.directed = directed
        self.coupling = coupling

    def fit(self, X, y=None):
        emb = _embed_input(
            X, self.n_components, self.normalized, self.directed, self.coupling
        )
        self.embedding_ = emb.coords
        self.eigenvalues_ = emb.eigenvalues
        self.node_ids_ = list(emb.node_order)
        self._result = emb
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).embedding_


class AggressionScorer(BaseEstimator):
    """Embed a signed graph and score each node's attack posture.

    ``fit_predict`` returns one label per node of the input graph, in node
    order: green (no outgoing attacks), red (attacks outweigh being
    attacked), orange (the rest).
    """

    def __init__(
        self,
        n_components=2,
        normalized=True,
        directed=False,
        coupling=1.0,
        weighted=True,
        epsilon=1e-9,
    ):
        self.n_components = n_components
        self.normalized = normalized
        self.directed = directed
        self.coupling = coupling
        self.weighted = weighted
        self.epsilon = epsilon

    def fit(self, X, y=None):
        if not isinstance(X, SignedDiGraph):
            raise TypeError("AggressionScorer requires a SignedDiGraph")
        emb = _embed_input(
            X, self.n_components, self.normalized, self.directed, self.coupling
        )
        self.embedding_ = emb.coords
        self.node_ids_ = list(emb.node_order)
        self.scores_ = aggression_scores(
            emb, X, weighted=self.weighted, epsilon=self.epsilon
        )
        self.labels_ = [s.label for s in self.scores_]
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_
