import numpy as np

from conflictnet import Node, SignedDiGraph

DEFAULT_CATEGORY = "militias"


def mk_graph(ids, pos=(), neg=(), categories=None):
    """Small-graph builder: edges as (src, dst) or (src, dst, weight)."""
    if isinstance(ids, int):
        ids = [f"n{i}" for i in range(ids)]
    cats = categories or {}
    nodes = [Node(i, cats.get(i, DEFAULT_CATEGORY)) for i in ids]
    index = {a: i for i, a in enumerate(ids)}
    n = len(ids)
    P = np.zeros((n, n))
    N = np.zeros((n, n))
    for edge_list, M in ((pos, P), (neg, N)):
        for edge in edge_list:
            s, d = edge[0], edge[1]
            w = edge[2] if len(edge) > 2 else 1.0
            M[index[s], index[d]] = w
    return SignedDiGraph(nodes, P, N)


def random_signed_graph(rng, n, p_pos=0.35, p_neg=0.35, weighted=False):
    """Random directed graph with at least one tie in each layer."""
    while True:
        P = np.zeros((n, n))
        N = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                r = rng.random()
                if r < p_pos:
                    P[i, j] = rng.integers(1, 4) if weighted else 1.0
                elif r < p_pos + p_neg:
                    N[i, j] = rng.integers(1, 4) if weighted else 1.0
        if P.any() and N.any():
            break
    cats = ["government", "rebels", "islamists"]
    nodes = [Node(f"n{i}", cats[int(rng.integers(0, len(cats)))]) for i in range(n)]
    return SignedDiGraph(nodes, P, N)


FIXTURE_CSV = """\
EVENT_ID_CNTY,EVENT_DATE,EVENT_TYPE,COUNTRY,LATITUDE,LONGITUDE,ACTOR1,ALLY_ACTOR_1,ACTOR2,ALLY_ACTOR_2,FATALITIES
1MLI,05 January 2012,Battle-No change of territory,Mali,16.27,-0.04,Alpha Front,Beta Militia,Gamma Army,,3
2MLI,09 January 2012,Battle-No change of territory,Mali,16.60,-3.00,Alpha Front,,Gamma Army,Delta Guard,1
3NER,14 February 2012,Violence against civilians,Niger,13.51,2.11,Beta Militia,,Civilians (Niger),,5
4NER,20 February 2012,Riots/Protests,Niger,13.52,2.10,Rioters (Niger),,Police Forces of Niger,,0
5MLI,02 March 2013,Battle-No change of territory,Mali,16.71,-3.01,Gamma Army,Delta Guard,Alpha Front,,2
6DZA,10 March 2013,Remote violence,Algeria,27.87,-0.29,Alpha Front,,Delta Guard,,4
"""

BORDERS_GEOJSON = """\
{"type": "FeatureCollection", "features": [
  {"type": "Feature", "properties": {"countries": "Mali-Niger"},
   "geometry": {"type": "LineString", "coordinates": [[0.0, 14.0], [4.0, 14.0]]}}
]}
"""
