"""Synthetic graph generators for tests and examples."""

from __future__ import annotations

import numpy as np

from .graph import Node, SignedDiGraph


def make_two_block_graph(
    n_per_block: int = 10,
    p_within: float = 0.8,
    p_cross: float = 0.8,
    seed: int = 0,
) -> SignedDiGraph:
    """Two hostile camps: alliances inside each block, attacks across.

    Block "a" nodes attack block "b" nodes; positive ties are sampled
    independently per ordered pair inside each block. The planted split is
    what a signed spectral embedding should recover.
    """
    if n_per_block < 2:
        raise ValueError("n_per_block must be >= 2")
    rng = np.random.default_rng(seed)
    width = len(str(n_per_block - 1))
    a_ids = [f"a{i:0{width}d}" for i in range(n_per_block)]
    b_ids = [f"b{i:0{width}d}" for i in range(n_per_block)]
    nodes = [Node(i, "islamists") for i in a_ids] + [Node(i, "government") for i in b_ids]
    n = 2 * n_per_block
    pos = np.zeros((n, n))
    neg = np.zeros((n, n))
    for block in (range(n_per_block), range(n_per_block, n)):
        for i in block:
            for j in block:
                if i != j and rng.random() < p_within:
                    pos[i, j] = 1.0
    for i in range(n_per_block):
        for j in range(n_per_block, n):
            if rng.random() < p_cross:
                neg[i, j] = 1.0
    return SignedDiGraph(nodes, pos, neg)


def make_star_attack(n_victims: int = 2) -> SignedDiGraph:
    """One raider attacking every victim; victims are allied pairwise."""
    if n_victims < 1:
        raise ValueError("n_victims must be >= 1")
    width = len(str(max(n_victims - 1, 1)))
    victims = [f"victim{i:0{width}d}" for i in range(n_victims)]
    nodes = [Node("raider", "rebels")] + [Node(v, "civilians") for v in victims]
    n = 1 + n_victims
    pos = np.zeros((n, n))
    neg = np.zeros((n, n))
    for i in range(1, n):
        neg[0, i] = 1.0
        for j in range(1, n):
            if i != j:
                pos[i, j] = 1.0
    return SignedDiGraph(nodes, pos, neg)
