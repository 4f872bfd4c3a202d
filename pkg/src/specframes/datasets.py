"""Bundled graph data."""
from __future__ import annotations

from importlib import resources

import numpy as np
import scipy.sparse as sp

from .graphs import Graph, load_graph

__all__ = ["minnesota", "MINNESOTA_BRIDGE"]

# Joining this pair of vertices makes the road network connected.
MINNESOTA_BRIDGE = (348, 354)


def minnesota(connected: bool = True) -> Graph:
    """Unweighted Minnesota road network (2642 vertices) with vertex coordinates.

    The raw data has two components; with ``connected=True`` the single
    edge :data:`MINNESOTA_BRIDGE` is added to join them.
    """
    base = resources.files("specframes") / "data"
    with resources.as_file(base / "minnesota.edges") as p:
        g = load_graph(p, "edge-list")
    with resources.as_file(base / "minnesota_xy.csv") as p:
        xy = np.loadtxt(p, delimiter=",", comments="#")
    W = g.adjacency
    if connected:
        i, j = MINNESOTA_BRIDGE
        extra = sp.coo_matrix(([1.0, 1.0], ([i, j], [j, i])), shape=W.shape)
        W = (W + extra).tocsr()
        W.data[:] = np.minimum(W.data, 1.0)
    return Graph(W, coords=xy, name="minnesota")
