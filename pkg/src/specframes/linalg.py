"""Sparse symmetric storage, LDL^T factorization, inertia counts, eigensolvers.

The LDL^T routines follow the classic up-looking algorithm: a symbolic pass
computes the elimination tree and column counts once per sparsity pattern,
after which any number of numeric factorizations with that pattern (for
example ``A - s I`` for many shifts ``s``) reuse it. No numerical pivoting
is performed; only the signs of the pivots are needed for inertia counts.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import DataError, NumericalError, ParameterError

__all__ = [
    "SparseSym",
    "SymbolicLdl",
    "LdlFactorization",
    "EigenDecomposition",
    "minimum_degree_ordering",
    "ldl_symbolic",
    "ldl_numeric",
    "ldl_factorize",
    "inertia_below",
    "dense_eigh",
    "spmv",
    "estimate_lambda_upper",
    "DENSE_EIGH_CAP",
]

DENSE_EIGH_CAP = 4000


@dataclass(frozen=True, eq=False)
class SparseSym:
    """Symmetric matrix stored as the lower triangle in CSC form.

    Every column stores its diagonal entry first (explicit zeros included), so
    diagonal shifts never change the sparsity pattern.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    @classmethod
    def from_matrix(cls, a, check_symmetric: bool = True, tol: float = 0.0) -> "SparseSym":
        A = sp.csc_matrix(a, dtype=float)
        if A.shape[0] != A.shape[1]:
            raise DataError(f"matrix must be square, got {A.shape}")
        A.sum_duplicates()
        if check_symmetric:
            diff = A - A.T
            if diff.nnz and np.abs(diff.data).max() > tol:
                raise DataError("matrix is not symmetric")
            pat = (A != 0).astype(np.int8)
            if ((pat - pat.T) != 0).nnz and tol == 0.0:
                raise DataError("matrix is not structurally symmetric")
        n = A.shape[0]
        low = sp.tril(A, k=-1).tocsc()
        low.sort_indices()
        diag = A.diagonal()
        counts = np.diff(low.indptr) + 1
        indptr = np.concatenate([[0], np.cumsum(counts)])
        indices = np.empty(indptr[-1], dtype=np.int64)
        data = np.empty(indptr[-1])
        starts = indptr[:-1]
        indices[starts] = np.arange(n)
        data[starts] = diag
        mask = np.ones(indptr[-1], dtype=bool)
        mask[starts] = False
        indices[mask] = low.indices
        data[mask] = low.data
        return cls(n, indptr, indices, data)

    @property
    def nnz(self) -> int:
        return len(self.data)

    def diagonal(self) -> np.ndarray:
        return self.data[self.indptr[:-1]].copy()

    def lower(self) -> sp.csc_matrix:
        return sp.csc_matrix((self.data, self.indices, self.indptr), shape=(self.n, self.n))

    def to_scipy(self) -> sp.csr_matrix:
        lo = self.lower()
        full = lo + lo.T - sp.diags(self.diagonal())
        return sp.csr_matrix(full)

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def shifted(self, s: float) -> "SparseSym":
        """Return ``A - s I`` with the same pattern."""
        data = self.data.copy()
        data[self.indptr[:-1]] -= s
        return SparseSym(self.n, self.indptr, self.indices, data)

    def max_abs(self) -> float:
        return float(np.abs(self.data).max()) if self.nnz else 0.0


def spmv(a: SparseSym, x) -> np.ndarray:
    """``y = A x`` expanding the stored lower triangle symmetrically."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != a.n:
        raise ParameterError(f"dimension mismatch: matrix is {a.n}, vector is {x.shape[0]}")
    lo = a.lower()
    d = a.diagonal()
    if x.ndim == 1:
        return lo @ x + lo.T @ x - d * x
    return lo @ x + lo.T @ x - d[:, None] * x


def _adjacency_sets(a: SparseSym) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(a.n)]
    for j in range(a.n):
        for i in a.indices[a.indptr[j] + 1:a.indptr[j + 1]]:
            i = int(i)
            adj[i].add(j)
            adj[j].add(i)
    return adj


def minimum_degree_ordering(a: SparseSym) -> np.ndarray:
    """Fill-reducing ordering by minimum degree on a quotient graph.

    Eliminated vertices become *elements* whose variable lists stand for the
    cliques they created; adjacent elements are absorbed into the new one.
    The degree used for selection is the approximate external degree
    ``|A_i \\ {i}| + sum_e |L_e \\ {i}|`` (an upper bound on the true degree).
    Ties are broken by the smallest vertex index, so the result is
    deterministic.
    """
    n = a.n
    var_adj = _adjacency_sets(a)
    elem_adj: list[set[int]] = [set() for _ in range(n)]  # elements touching variable i
    elem_vars: dict[int, set[int]] = {}

    def degree(i: int) -> int:
        d = len(var_adj[i])
        for e in elem_adj[i]:
            d += len(elem_vars[e]) - 1
        return d

    deg = [len(s) for s in var_adj]
    heap = [(deg[i], i) for i in range(n)]
    heapq.heapify(heap)
    eliminated = np.zeros(n, dtype=bool)
    order = []
    while heap:
        d, p = heapq.heappop(heap)
        if eliminated[p] or d != deg[p]:
            continue
        eliminated[p] = True
        order.append(p)
        # new element p: union of variable neighbours and absorbed elements
        Lp = set(var_adj[p])
        for e in elem_adj[p]:
            Lp |= elem_vars.pop(e)
        Lp.discard(p)
        absorbed = elem_adj[p]
        elem_vars[p] = Lp
        for i in Lp:
            var_adj[i].discard(p)
            var_adj[i] -= Lp  # now reachable through element p
            elem_adj[i] -= absorbed
            elem_adj[i].add(p)
        var_adj[p] = set()
        elem_adj[p] = set()
        for i in Lp:
            deg[i] = min(degree(i), n - len(order) - 1)
            heapq.heappush(heap, (deg[i], i))
    return np.asarray(order, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class SymbolicLdl:
    """Ordering, elimination tree and column pointers of ``L``."""

    n: int
    perm: np.ndarray
    pinv: np.ndarray
    parent: np.ndarray
    lp: np.ndarray
    # full symmetric pattern in CSC form; values are gathered via ``src``
    a_indptr: np.ndarray = field(repr=False)
    a_indices: np.ndarray = field(repr=False)
    src: np.ndarray = field(repr=False)
    pattern_key: tuple = field(repr=False)

    @property
    def nnz_l(self) -> int:
        return int(self.lp[-1])


@dataclass(frozen=True, eq=False)
class LdlFactorization:
    """``P A P^T = L diag(d) L^T`` with unit lower-triangular ``L``.

    ``perm[k]`` is the original index of the k-th pivot. ``perturbed`` lists
    pivots that were exactly zero and replaced by ``+eps_pivot``.
    """

    symbolic: SymbolicLdl
    l_indices: np.ndarray
    l_values: np.ndarray
    d: np.ndarray
    perturbed: tuple[int, ...] = ()

    @property
    def perm(self) -> np.ndarray:
        return self.symbolic.perm

    @property
    def n_negative(self) -> int:
        return int(np.count_nonzero(self.d < 0))

    def L(self) -> sp.csc_matrix:
        s = self.symbolic
        strict = sp.csc_matrix((self.l_values, self.l_indices, s.lp), shape=(s.n, s.n))
        return sp.csc_matrix(strict + sp.eye(s.n))

    def reconstruct(self) -> np.ndarray:
        """Return ``L diag(d) L^T`` mapped back to the original ordering."""
        L = self.L().toarray()
        PAPt = L @ np.diag(self.d) @ L.T
        out = np.empty_like(PAPt)
        p = self.perm
        out[np.ix_(p, p)] = PAPt
        return out


def _full_pattern(a: SparseSym):
    """CSC pattern of the full symmetric matrix and a gather index into ``a.data``."""
    lo_cols = np.repeat(np.arange(a.n), np.diff(a.indptr))
    lo_rows = a.indices
    k = np.arange(a.nnz)
    off = lo_rows != lo_cols
    rows = np.concatenate([lo_rows, lo_cols[off]])
    cols = np.concatenate([lo_cols, lo_rows[off]])
    src = np.concatenate([k, k[off]])
    order = np.lexsort((rows, cols))
    rows, cols, src = rows[order], cols[order], src[order]
    indptr = np.concatenate([[0], np.cumsum(np.bincount(cols, minlength=a.n))])
    return indptr, rows, src


def ldl_symbolic(a: SparseSym, ordering: str = "min-degree") -> SymbolicLdl:
    """Elimination tree and column counts of the permuted matrix."""
    n = a.n
    if ordering == "natural":
        perm = np.arange(n, dtype=np.int64)
    elif ordering in ("min-degree", "amd"):
        perm = minimum_degree_ordering(a)
    else:
        raise ParameterError(f"unknown ordering {ordering!r}")
    pinv = np.empty(n, dtype=np.int64)
    pinv[perm] = np.arange(n)
    a_indptr, a_indices, src = _full_pattern(a)

    parent = [-1] * n
    flag = [-1] * n
    lnz = [0] * n
    ap = a_indptr.tolist()
    ai = pinv[a_indices].tolist()
    pl = perm.tolist()
    for k in range(n):
        flag[k] = k
        kk = pl[k]
        for p in range(ap[kk], ap[kk + 1]):
            i = ai[p]
            if i < k:
                while flag[i] != k:
                    if parent[i] == -1:
                        parent[i] = k
                    lnz[i] += 1
                    flag[i] = k
                    i = parent[i]
    lp = np.concatenate([[0], np.cumsum(lnz)]).astype(np.int64)
    key = (n, a.indptr.tobytes(), a.indices.tobytes())
    return SymbolicLdl(n, perm, pinv, np.asarray(parent, dtype=np.int64), lp,
                       a_indptr, pinv[a_indices], src, key)


def ldl_numeric(symbolic: SymbolicLdl, a: SparseSym, eps_pivot: float | None = None) -> LdlFactorization:
    """Numeric factorization reusing ``symbolic``.

    Exactly zero pivots are replaced by ``+eps_pivot`` (default
    ``1e-12 * max(max|A|, 1)``) and reported in ``perturbed``. Raising pivot
    ``k`` by ``eps`` factorizes ``A + eps e_k e_k^T`` exactly, a positive
    rank-one update that cannot create a negative eigenvalue, so the
    negative-pivot count stays the number of eigenvalues strictly below 0.
    """
    if symbolic.pattern_key != (a.n, a.indptr.tobytes(), a.indices.tobytes()):
        raise ParameterError("sparsity pattern differs from the symbolic analysis")
    n = symbolic.n
    if eps_pivot is None:
        eps_pivot = 1e-12 * max(a.max_abs(), 1.0)
    ax = a.data[symbolic.src].tolist()
    ap = symbolic.a_indptr.tolist()
    ai = symbolic.a_indices.tolist()
    parent = symbolic.parent.tolist()
    lp = symbolic.lp.tolist()
    perm = symbolic.perm.tolist()
    nnz_l = lp[-1]
    li = [0] * nnz_l
    lx = [0.0] * nnz_l
    lnz = [0] * n
    flag = [-1] * n
    y = [0.0] * n
    d = [0.0] * n
    pattern = [0] * n
    perturbed = []
    for k in range(n):
        top = n
        flag[k] = k
        kk = perm[k]
        for p in range(ap[kk], ap[kk + 1]):
            i = ai[p]
            if i <= k:
                y[i] += ax[p]
                length = 0
                while flag[i] != k:
                    pattern[length] = i
                    length += 1
                    flag[i] = k
                    i = parent[i]
                while length > 0:
                    top -= 1
                    length -= 1
                    pattern[top] = pattern[length]
        dk = y[k]
        y[k] = 0.0
        for t in range(top, n):
            i = pattern[t]
            yi = y[i]
            y[i] = 0.0
            p2 = lp[i] + lnz[i]
            for p in range(lp[i], p2):
                y[li[p]] -= lx[p] * yi
            lki = yi / d[i]
            dk -= lki * yi
            li[p2] = k
            lx[p2] = lki
            lnz[i] += 1
        if dk == 0.0:
            dk = eps_pivot
            perturbed.append(k)
        elif not np.isfinite(dk):
            raise NumericalError(f"non-finite pivot at step {k}")
        d[k] = dk
    return LdlFactorization(symbolic, np.asarray(li, dtype=np.int64), np.asarray(lx),
                            np.asarray(d), tuple(perturbed))


def ldl_factorize(a: SparseSym, ordering: str = "min-degree",
                  symbolic: SymbolicLdl | None = None) -> LdlFactorization:
    if symbolic is None:
        symbolic = ldl_symbolic(a, ordering)
    return ldl_numeric(symbolic, a)


def inertia_below(a: SparseSym, symbolic: SymbolicLdl | None = None,
                  ordering: str = "min-degree") -> int:
    """Number of negative eigenvalues of ``a`` (Sylvester's law of inertia)."""
    return ldl_factorize(a, ordering, symbolic).n_negative


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def gft(self, f) -> np.ndarray:
        return self.eigenvectors.T @ np.asarray(f, dtype=float)

    def igft(self, fhat) -> np.ndarray:
        return self.eigenvectors @ np.asarray(fhat, dtype=float)


def dense_eigh(a, cap: int = DENSE_EIGH_CAP, driver: str = "evd") -> EigenDecomposition:
    """Full symmetric eigendecomposition via LAPACK.

    ``driver='ev'`` selects tridiagonal QL/QR iteration, the default ``'evd'``
    divide and conquer on the same tridiagonal reduction.
    """
    if sp.issparse(a):
        a = a.toarray()
    elif isinstance(a, SparseSym):
        a = a.to_dense()
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ParameterError("dense_eigh needs a square matrix")
    if n > cap:
        raise ParameterError(f"n={n} exceeds the dense eigensolver cap of {cap}")
    try:
        w, U = scipy.linalg.eigh(a, driver=driver, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from None
    return EigenDecomposition(w, U)


def estimate_lambda_upper(a: SparseSym, method: str = "anderson-morley", seed: int = 0,
                          maxiter: int = 5000, tol: float = 1e-10) -> float:
    """Upper estimate of the largest eigenvalue of a graph Laplacian.

    ``'anderson-morley'`` returns ``max_{i~j} (d_i + d_j)`` with ``d`` the
    diagonal (weighted degrees); ``'power'`` returns the Rayleigh quotient of
    a power iteration inflated by 1 %.
    """
    if method == "anderson-morley":
        d = a.diagonal()
        lo = a.lower().tocoo()
        off = (lo.row != lo.col) & (lo.data != 0)
        if not off.any():
            return float(d.max(initial=0.0))
        return float((d[lo.row[off]] + d[lo.col[off]]).max())
    if method == "power":
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(a.n)
        x /= np.linalg.norm(x)
        rq = 0.0
        for _ in range(maxiter):
            y = spmv(a, x)
            new = float(x @ y)
            ny = np.linalg.norm(y)
            if ny == 0:
                return 0.0
            x = y / ny
            if abs(new - rq) <= tol * abs(new):
                rq = new
                break
            rq = new
        return 1.01 * rq
    raise ParameterError(f"unknown method {method!r}")
