"""Graph construction and Laplacian assembly.

Graphs are undirected, weighted, and stored as symmetric CSR adjacency
matrices with an exactly zero diagonal.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import ConstructionError, DataError, ParameterError

__all__ = [
    "Graph",
    "Laplacian",
    "build_path",
    "build_ring",
    "build_comet",
    "build_sensor",
    "build_random_regular",
    "build_erdos_renyi",
    "from_edges",
    "load_graph",
    "laplacian",
    "component_count",
]


@dataclass(frozen=True, eq=False)
class Graph:
    """Weighted undirected graph.

    Attributes
    ----------
    adjacency : scipy.sparse.csr_matrix
        Symmetric, nonnegative, zero diagonal.
    coords : ndarray, optional
        Vertex coordinates (N x 2) used only for plot data.
    name : str
        Free-form label carried into file headers.
    """

    adjacency: sp.csr_matrix
    coords: np.ndarray | None = None
    name: str = "graph"

    def __post_init__(self):
        W = sp.csr_matrix(self.adjacency, dtype=float)
        W.sum_duplicates()
        W.eliminate_zeros()
        W.sort_indices()
        if W.shape[0] != W.shape[1]:
            raise DataError(f"adjacency must be square, got {W.shape}")
        if W.nnz and W.data.min() < 0:
            raise DataError("negative edge weight")
        if W.diagonal().any():
            raise DataError("self-loops are not allowed")
        if (W != W.T).nnz:
            raise DataError("adjacency is not symmetric")
        object.__setattr__(self, "adjacency", W)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_edges(self) -> int:
        return self.adjacency.nnz // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    def edge_set(self) -> set[tuple[int, int, float]]:
        U = sp.triu(self.adjacency).tocoo()
        return set(zip(U.row.tolist(), U.col.tolist(), U.data.tolist()))

    def is_connected(self) -> bool:
        return component_count(self) == 1


@dataclass(frozen=True, eq=False)
class Laplacian:
    kind: str
    matrix: sp.csr_matrix
    degrees: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def component_count(g: Graph) -> int:
    return int(connected_components(g.adjacency, directed=False)[0])


def from_edges(n, rows, cols, weights=None, name="graph", coords=None) -> Graph:
    """Build a graph from an undirected edge list (each edge listed once)."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    w = np.ones(len(rows)) if weights is None else np.asarray(weights, dtype=float)
    W = sp.coo_matrix((w, (rows, cols)), shape=(n, n)).tocsr()
    W = W + W.T
    return Graph(W, coords=coords, name=name)


def build_path(n: int) -> Graph:
    if n < 2:
        raise ParameterError("path graph needs n >= 2")
    i = np.arange(n - 1)
    return from_edges(n, i, i + 1, name=f"path-{n}")


def build_ring(n: int) -> Graph:
    if n < 3:
        raise ParameterError("ring graph needs n >= 3")
    i = np.arange(n)
    return from_edges(n, i, (i + 1) % n, name=f"ring-{n}")


def build_comet(n: int, center_degree: int) -> Graph:
    """Star with ``center_degree`` leaves whose hub also carries a path tail.

    Vertex 0 is the hub, vertices ``1..center_degree`` are leaves and the
    remaining vertices form a path hanging off the hub.
    """
    if not 1 <= center_degree < n:
        raise ParameterError("comet graph needs 1 <= center_degree < n")
    leaves = np.arange(1, center_degree + 1)
    rows = [np.zeros(center_degree, dtype=int)]
    cols = [leaves]
    tail = np.arange(center_degree + 1, n)
    if len(tail):
        chain = np.concatenate([[0], tail])
        rows.append(chain[:-1])
        cols.append(chain[1:])
    return from_edges(n, np.concatenate(rows), np.concatenate(cols), name=f"comet-{n}")


def build_sensor(n: int, seed: int = 0, threshold: float = 0.3, sigma: float = 0.1,
                 max_tries: int = 100) -> Graph:
    """Random geometric graph with thresholded Gaussian weights.

    Points are uniform in the unit square; ``W_ij = exp(-d^2 / (2 sigma^2))``
    when ``d <= threshold``. Placements that leave the graph disconnected are
    redrawn from the same generator.
    """
    if n < 2:
        raise ParameterError("sensor graph needs n >= 2")
    if threshold <= 0 or sigma <= 0:
        raise ParameterError("threshold and sigma must be positive")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        xy = rng.random((n, 2))
        d2 = ((xy[:, None, :] - xy[None, :, :]) ** 2).sum(-1)
        mask = (d2 <= threshold**2) & ~np.eye(n, dtype=bool)
        W = np.where(mask, np.exp(-d2 / (2 * sigma**2)), 0.0)
        g = Graph(sp.csr_matrix(W), coords=xy, name=f"sensor-{n}")
        if g.is_connected():
            return g
    raise ConstructionError(f"no connected sensor placement after {max_tries} draws")


def build_random_regular(n: int, r: int, seed: int = 0, max_tries: int = 1000) -> Graph:
    """Simple r-regular graph from the pairing model with full restarts."""
    if not 3 <= r < n:
        raise ParameterError("random regular graph needs 3 <= r < n")
    if (r * n) % 2:
        raise ParameterError("r * n must be even")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), r)
    for _ in range(max_tries):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        a, b = pairs.min(axis=1), pairs.max(axis=1)
        if np.any(a == b):
            continue
        keys = a.astype(np.int64) * n + b
        if len(np.unique(keys)) != len(keys):
            continue
        return from_edges(n, a, b, name=f"rr-{n}-{r}")
    raise ConstructionError(f"pairing model rejected {max_tries} times")


def build_erdos_renyi(n: int, p: float, seed: int = 0) -> Graph:
    if not 0 < p < 1:
        raise ParameterError("edge probability must satisfy 0 < p < 1")
    if n < 2:
        raise ParameterError("n must be >= 2")
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(n, k=1)
    keep = rng.random(len(rows)) < p
    return from_edges(n, rows[keep], cols[keep], name=f"er-{n}-{p:g}")


def _read_edge_list(path: Path) -> Graph:
    rows, cols, ws = [], [], []
    n_declared = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "nodes":
                    n_declared = int(parts[1])
                continue
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise DataError(f"{path}:{lineno}: expected 'i j [w]', got {line!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            if i < 0 or j < 0:
                raise DataError(f"{path}:{lineno}: negative vertex index")
            if w < 0:
                raise DataError(f"{path}:{lineno}: negative weight {w}")
            if i == j:
                raise DataError(f"{path}:{lineno}: self-loop at vertex {i}")
            rows.append(i)
            cols.append(j)
            ws.append(w)
    n = max(max(rows, default=-1), max(cols, default=-1)) + 1
    if n_declared is not None:
        if n_declared < n:
            raise DataError(f"{path}: declared {n_declared} nodes but index {n - 1} used")
        n = n_declared
    # an undirected edge may appear as (i, j), (j, i) or both
    best: dict[tuple[int, int], float] = {}
    conflict = False
    for i, j, w in zip(rows, cols, ws):
        key = (min(i, j), max(i, j))
        if key in best and best[key] != w:
            conflict = True
        best[key] = max(w, best.get(key, w))
    if conflict:
        warnings.warn(f"{path.name}: conflicting weights symmetrized by max(W_ij, W_ji)",
                      stacklevel=3)
    keys = np.array(list(best), dtype=np.int64).reshape(-1, 2)
    return from_edges(n, keys[:, 0], keys[:, 1], list(best.values()), name=path.stem)


def _symmetrize(W, name) -> Graph:
    W = sp.csr_matrix(W, dtype=float)
    W.sum_duplicates()
    if W.nnz and W.data.min() < 0:
        raise DataError(f"{name}: negative edge weight")
    if W.diagonal().any():
        raise DataError(f"{name}: self-loops are not allowed")
    W.eliminate_zeros()
    if (W != W.T).nnz:
        warnings.warn(f"{name}: asymmetric adjacency symmetrized by max(W_ij, W_ji)",
                      stacklevel=3)
    return Graph(W.maximum(W.T).tocsr(), name=name)


def load_graph(path, format: str | None = None) -> Graph:
    """Read an edge list (``i j [w]`` per line) or a Matrix Market file.

    Each undirected edge may be listed once or twice. When both
    orientations are present with different weights the larger one is kept
    and a warning is issued.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    if format is None:
        format = "matrix-market" if path.suffix == ".mtx" else "edge-list"
    if format == "edge-list":
        return _read_edge_list(path)
    if format == "matrix-market":
        try:
            M = scipy.io.mmread(str(path))
        except Exception as exc:  # scipy raises assorted types for bad files
            raise DataError(f"{path}: {exc}") from None
        M = sp.coo_matrix(M)
        if np.iscomplexobj(M.data):
            raise DataError(f"{path}: complex matrices are not supported")
        if M.shape[0] != M.shape[1]:
            raise DataError(f"{path}: matrix is not square")
        return _symmetrize(M, path.stem)
    raise ParameterError(f"unknown graph format {format!r}")


def laplacian(g: Graph, kind: str = "combinatorial") -> Laplacian:
    """Combinatorial ``D - W`` or normalized ``I - D^-1/2 W D^-1/2`` Laplacian.

    Isolated vertices get an all-zero row in the normalized Laplacian.
    """
    W = g.adjacency
    d = g.degrees
    if kind == "combinatorial":
        L = sp.diags(d) - W
    elif kind == "normalized":
        with np.errstate(divide="ignore"):
            dinv = np.where(d > 0, 1.0 / np.sqrt(d), 0.0)
        Dm = sp.diags(dinv)
        L = sp.diags((d > 0).astype(float)) - Dm @ W @ Dm
    else:
        raise ParameterError(f"unknown Laplacian kind {kind!r}")
    L = sp.csr_matrix(L)
    L.sort_indices()
    return Laplacian(kind=kind, matrix=L, degrees=d)


def expected_path_spectrum(n: int) -> np.ndarray:
    return 2 - 2 * np.cos(np.pi * np.arange(n) / n)


def expected_ring_spectrum(n: int) -> np.ndarray:
    return np.sort(2 - 2 * np.cos(2 * np.pi * np.arange(n) / n))


def er_edge_count_bounds(n: int, p: float, n_sigma: float = 5.0) -> tuple[float, float]:
    pairs = n * (n - 1) / 2
    mean = p * pairs
    sd = math.sqrt(pairs * p * (1 - p))
    return mean - n_sigma * sd, mean + n_sigma * sd
