import numpy as np
import pytest
from sklearn.base import clone

from conflictnet import (
    AggressionScorer,
    GREEN,
    RED,
    SignedSpectralEmbedding,
    aggression_scores,
    embed_graph,
    make_star_attack,
    make_two_block_graph,
    symmetrize,
)


def test_embedding_estimator_on_graph():
    g = make_two_block_graph(n_per_block=4, seed=1)
    est = SignedSpectralEmbedding(n_components=2)
    coords = est.fit_transform(g)
    assert coords.shape == (g.n, 2)
    assert est.node_ids_ == g.node_ids
    assert est.eigenvalues_.shape == (2,)
    reference = embed_graph(g, k=2)
    assert np.allclose(coords, reference.coords)


def test_embedding_estimator_on_matrix():
    g = make_two_block_graph(n_per_block=3, seed=2)
    W = symmetrize(g)
    est = SignedSpectralEmbedding(n_components=1, normalized=False)
    coords = est.fit_transform(W)
    assert coords.shape == (W.shape[0], 1)
    assert est.node_ids_ == [str(i) for i in range(W.shape[0])]


def test_embedding_estimator_directed_splits_roles():
    g = make_star_attack(n_victims=3)
    est = SignedSpectralEmbedding(n_components=2, directed=True)
    est.fit(g)
    assert len(est.node_ids_) == 2 * g.n
    assert {n.rsplit("::", 1)[1] for n in est.node_ids_} == {"out", "in"}


def test_estimator_params_round_trip():
    est = SignedSpectralEmbedding(n_components=3, normalized=False, coupling=0.5)
    params = est.get_params()
    assert params == {
        "n_components": 3,
        "normalized": False,
        "directed": False,
        "coupling": 0.5,
    }
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(n_components=1)
    assert est.get_params()["n_components"] == 1


def test_scorer_matches_functional_pipeline():
    g = make_star_attack(n_victims=2)
    scorer = AggressionScorer(n_components=2)
    labels = scorer.fit_predict(g)
    emb = embed_graph(g, k=2)
    expected = aggression_scores(emb, g)
    assert labels == [s.label for s in expected]
    assert scorer.scores_ == expected
    by_actor = dict(zip([s.actor for s in scorer.scores_], labels))
    assert by_actor["raider"] == RED
    assert all(by_actor[a] == GREEN for a in by_actor if a != "raider")


def test_scorer_rejects_matrices():
    with pytest.raises(TypeError):
        AggressionScorer().fit(np.zeros((3, 3)))


def test_scorer_is_cloneable_with_all_params():
    scorer = AggressionScorer(weighted=False, epsilon=0.01, directed=True)
    params = clone(scorer).get_params()
    assert params["weighted"] is False
    assert params["epsilon"] == 0.01
    assert params["directed"] is True
