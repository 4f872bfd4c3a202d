"""Atoms, analysis and synthesis operators, frame diagnostics and comparison banks.

Atoms are ``g_{i,m} = sqrt(N) g_m(L) delta_i``. Coefficient arrays have
shape ``(N, M)`` with ``c[i, m] = <f, g_{i,m}>``; flattened atom lists use
column index ``m * N + i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.vq import kmeans2

from .errors import DataError, ParameterError
from .kernels import (
    ChebyshevApprox,
    CosineWindow,
    FilterBank,
    Warped,
    chebyshev_fit,
    log_wavelet_bank,
    make_hann,
    spectrum_adapted_wavelet_bank,
)
from .linalg import EigenDecomposition, SparseSym, dense_eigh, spmv
from .warping import ArccosWarp, exact_cdf_points, interpolate

__all__ = [
    "filter_signal",
    "filter_signal_chebyshev",
    "translate_atom",
    "atoms",
    "analyze",
    "analyze_direct",
    "analyze_chebyshev",
    "synthesize",
    "frame_bounds",
    "atom_norms",
    "atom_norm_stats",
    "cumulative_coherence",
    "FrameReport",
    "frame_report",
    "SgwtBandpass",
    "SgwtLowpass",
    "MeyerScaling",
    "MeyerWavelet",
    "sgwt_bank",
    "meyer_bank",
    "baseline_banks",
    "spectral_clustering",
    "synthesize_test_signal",
    "VertexFrequencyResult",
    "vertex_frequency_demo",
    "DEMO_BANDS",
    "COHERENCE_CAP",
]

COHERENCE_CAP = 20_000
DEMO_BANDS = ((0.06, 0.08), (0.3, 0.5), (3.2, 3.7), (4.6, 5.0), (6.0, 6.6))


def _signal(eig: EigenDecomposition, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape[0] != eig.n:
        raise DataError(f"signal length {f.shape[0]} does not match graph size {eig.n}")
    return f


def filter_signal(eig: EigenDecomposition, kernel, f) -> np.ndarray:
    """``U diag(g(lam)) U^T f``; ``f`` may hold several signals as columns."""
    f = _signal(eig, f)
    U = eig.eigenvectors
    g = np.asarray(kernel(eig.eigenvalues), dtype=float)
    fhat = U.T @ f
    return U @ (g.reshape((-1,) + (1,) * (f.ndim - 1)) * fhat)


def _matvec(matrix):
    if isinstance(matrix, SparseSym):
        return lambda v: spmv(matrix, v)
    matrix = getattr(matrix, "matrix", matrix)
    return lambda v: matrix @ v


class _Operator:
    def __init__(self, matrix):
        self._mv = _matvec(matrix)

    def __matmul__(self, v):
        return self._mv(v)


def filter_signal_chebyshev(matrix, kernel, f, order: int = 120,
                            interval: tuple[float, float] | None = None) -> np.ndarray:
    """Approximate ``g(L) f`` with a Chebyshev expansion using only products with ``L``.

    ``kernel`` may already be a :class:`ChebyshevApprox`; otherwise it is
    fitted on ``interval`` (required in that case).
    """
    if not isinstance(kernel, ChebyshevApprox):
        if interval is None:
            raise ParameterError("an interval is needed to fit a Chebyshev approximant")
        kernel = chebyshev_fit(kernel, interval, order)
    return kernel.apply(_Operator(matrix), np.asarray(f, dtype=float))


def translate_atom(eig: EigenDecomposition, kernel, i: int) -> np.ndarray:
    """``sqrt(N) g(L) delta_i``."""
    if not 0 <= i < eig.n:
        raise ParameterError(f"vertex {i} out of range")
    U = eig.eigenvectors
    g = np.asarray(kernel(eig.eigenvalues), dtype=float)
    return math.sqrt(eig.n) * (U @ (g * U[i]))


def atoms(eig: EigenDecomposition, bank: FilterBank) -> np.ndarray:
    """All atoms as columns of an ``N x (N M)`` matrix (column ``m N + i``)."""
    U = eig.eigenvectors
    N = eig.n
    blocks = [math.sqrt(N) * (U * g) @ U.T for g in bank.evaluate(eig.eigenvalues)]
    return np.hstack(blocks)


def analyze(eig: EigenDecomposition, bank: FilterBank, f) -> np.ndarray:
    """Coefficients ``c[i, m] = <f, g_{i,m}>`` via one spectral filtering per kernel."""
    f = _signal(eig, f)
    if f.ndim != 1:
        raise DataError("analyze expects a single signal")
    U = eig.eigenvectors
    fhat = U.T @ f
    G = bank.evaluate(eig.eigenvalues)  # (M, N)
    return math.sqrt(eig.n) * (U @ (G * fhat).T)


def analyze_direct(eig: EigenDecomposition, bank: FilterBank, f) -> np.ndarray:
    """Same as :func:`analyze` but through ``N M`` explicit inner products."""
    f = _signal(eig, f)
    D = atoms(eig, bank)
    return (D.T @ f).reshape(bank.M, eig.n).T


def analyze_chebyshev(matrix, bank: FilterBank, f, order: int = 120,
                      interval: tuple[float, float] | None = None) -> np.ndarray:
    if interval is None:
        interval = (0.0, bank.lambda_upper)
    f = np.asarray(f, dtype=float)
    cols = [filter_signal_chebyshev(matrix, g, f, order, interval) for g in bank]
    return math.sqrt(len(f)) * np.column_stack(cols)


def synthesize(eig: EigenDecomposition, bank: FilterBank, coefficients,
               A: float | None = None) -> np.ndarray:
    """``(1/A) sum_{i,m} c[i, m] g_{i,m}``; inverts :func:`analyze` for a tight bank."""
    c = np.asarray(coefficients, dtype=float)
    if c.shape != (eig.n, bank.M):
        raise DataError(f"coefficients must have shape {(eig.n, bank.M)}, got {c.shape}")
    if A is None:
        A, _ = frame_bounds(eig, bank)
    if not A > 0:
        raise ParameterError("synthesis needs a positive lower frame bound")
    U = eig.eigenvectors
    G = bank.evaluate(eig.eigenvalues)  # (M, N)
    chat = U.T @ c  # (N, M): spectral coefficients of each column
    out = U @ (G.T * chat).sum(axis=1)
    return math.sqrt(eig.n) * out / A


def frame_bounds(eig: EigenDecomposition, bank: FilterBank) -> tuple[float, float]:
    """``(N min G, N max G)`` with ``G`` sampled on the spectrum."""
    G = bank.G(eig.eigenvalues)
    return float(eig.n * G.min()), float(eig.n * G.max())


def atom_norms(eig: EigenDecomposition, bank: FilterBank) -> np.ndarray:
    """``||g_{i,m}||`` for every atom, ordered ``m N + i``.

    Uses ``||g_{i,m}||^2 = N sum_l g_m(lam_l)^2 u_l(i)^2``.
    """
    U2 = eig.eigenvectors ** 2
    G2 = bank.evaluate(eig.eigenvalues) ** 2  # (M, N)
    sq = eig.n * (U2 @ G2.T)  # (N, M)
    return np.sqrt(np.maximum(sq, 0.0)).T.ravel()


def _zero_atoms(norms: np.ndarray, rtol: float) -> np.ndarray:
    top = norms.max(initial=0.0)
    return norms <= rtol * top if top > 0 else np.ones_like(norms, dtype=bool)


def atom_norm_stats(eig: EigenDecomposition, bank: FilterBank, zero_rtol: float = 1e-10):
    """Return ``(norms, sigma, n_zero)``: atom norms, their population std and zero-norm count."""
    norms = atom_norms(eig, bank)
    return norms, float(norms.std()), int(_zero_atoms(norms, zero_rtol).sum())


def cumulative_coherence(eig: EigenDecomposition, bank: FilterBank, ks,
                         zero_rtol: float = 1e-10, cap: int = COHERENCE_CAP):
    """``mu_1(k)`` for each ``k`` in ``ks``, or ``None`` when some atom has zero norm.

    For every atom the absolute normalized correlations with all other atoms
    are sorted in decreasing order; ``mu_1(k)`` is the largest sum of the top
    ``k`` over all atoms. Exact, with an ``(N M)^2`` Gram matrix.
    """
    scalar = np.isscalar(ks)
    ks = [int(k) for k in np.atleast_1d(ks)]
    total = eig.n * bank.M
    if total > cap:
        raise ParameterError(f"N*M = {total} exceeds the coherence cap {cap}")
    for k in ks:
        if not 1 <= k < total:
            raise ParameterError(f"k must satisfy 1 <= k < N*M = {total}, got {k}")
    norms = atom_norms(eig, bank)
    if _zero_atoms(norms, zero_rtol).any():
        return None
    # eigen-coefficients of every atom: column m N + i holds sqrt(N) g_m(lam_l) u_l(i)
    U = eig.eigenvectors
    E = math.sqrt(eig.n) * np.hstack([(U * g).T for g in bank.evaluate(eig.eigenvalues)])
    E /= norms
    gram = np.abs(E.T @ E)
    np.fill_diagonal(gram, 0.0)
    kmax = max(ks)
    # partial sort: the kmax largest entries of each row, descending
    part = -np.partition(-gram, kmax - 1, axis=1)[:, :kmax]
    part = -np.sort(-part, axis=1)
    csum = np.cumsum(part, axis=1)
    out = {k: float(csum[:, k - 1].max()) for k in ks}
    return out[ks[0]] if scalar else out


@dataclass(frozen=True, eq=False)
class FrameReport:
    A: float
    B: float
    tight: bool
    tol: float
    atom_norms: np.ndarray = field(repr=False)
    sigma_norms: float
    n_zero_atoms: int
    coherence: dict | None
    n: int = 0

    @property
    def sigma_unit(self) -> float:
        """Std of ``||g_m(L) delta_i||``, i.e. of the atom norms without the ``sqrt(N)`` factor."""
        return self.sigma_norms / math.sqrt(self.n) if self.n else float("nan")

    def as_dict(self) -> dict:
        return {
            "A": self.A,
            "B": self.B,
            "tight": self.tight,
            "tol": self.tol,
            "sigma_norms": self.sigma_norms,
            "sigma_unit": self.sigma_unit,
            "n_zero_atoms": self.n_zero_atoms,
            "coherence": None if self.coherence is None
            else {str(k): v for k, v in self.coherence.items()},
        }


def frame_report(eig: EigenDecomposition, bank: FilterBank, ks=None,
                 tol: float = 1e-9) -> FrameReport:
    """Frame bounds, tightness, atom norm statistics and (optionally) ``mu_1`` at ``ks``."""
    A, B = frame_bounds(eig, bank)
    norms, sigma, n_zero = atom_norm_stats(eig, bank)
    coh = None
    if ks is not None:
        coh = cumulative_coherence(eig, bank, list(np.atleast_1d(ks)))
    tight = B > 0 and abs(B - A) <= tol * B
    return FrameReport(A, B, bool(tight), tol, norms, sigma, n_zero, coh, eig.n)


# -- comparison banks ------------------------------------------------------


@dataclass(frozen=True)
class SgwtBandpass:
    """Cubic-spline band-pass ``g(s lam)`` at dilation ``s``.

    ``g(x) = x^2`` below 1, ``4 / x^2`` above 2, joined by the cubic
    ``-5 + 11x - 6x^2 + x^3`` (C^1 at both knots).
    """

    scale: float

    def __call__(self, lam):
        x = self.scale * np.asarray(lam, dtype=float)
        with np.errstate(divide="ignore"):
            tail = 4.0 / (x * x)
        mid = -5 + x * (11 + x * (-6 + x))
        return np.where(x < 1, x * x, np.where(x <= 2, mid, tail))

    @staticmethod
    def peak() -> float:
        x = 2 - 1 / math.sqrt(3)
        return -5 + x * (11 + x * (-6 + x))


@dataclass(frozen=True)
class SgwtLowpass:
    """``height exp(-(lam / (0.6 lam_min))^4)``."""

    height: float
    lambda_min: float

    def __call__(self, lam):
        return self.height * np.exp(-(np.asarray(lam, dtype=float) / (0.6 * self.lambda_min)) ** 4)


def _meyer_nu(x):
    x = np.clip(x, 0.0, 1.0)
    return x ** 4 * (35 - 84 * x + 70 * x ** 2 - 20 * x ** 3)


@dataclass(frozen=True)
class MeyerScaling:
    """1 on ``[0, a]``, smooth cosine roll-off on ``[a, 2a]``, 0 beyond."""

    a: float

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        return np.where(lam <= self.a, 1.0,
                        np.where(lam < 2 * self.a,
                                 np.cos(np.pi / 2 * _meyer_nu(lam / self.a - 1)), 0.0))


@dataclass(frozen=True)
class MeyerWavelet:
    """Rises on ``[a, 2a]``, falls on ``[2a, 4a]``; squares of dyadic neighbours sum to one."""

    a: float

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        a = self.a
        rise = np.sin(np.pi / 2 * _meyer_nu(lam / a - 1))
        fall = np.cos(np.pi / 2 * _meyer_nu(lam / (2 * a) - 1))
        return np.where((lam >= a) & (lam < 2 * a), rise,
                        np.where((lam >= 2 * a) & (lam < 4 * a), fall, 0.0))


def sgwt_bank(lambda_upper: float, M: int, lpfactor: float = 20.0) -> FilterBank:
    """Simplified SGWT-style bank: lowpass plus ``M - 1`` dilations of :class:`SgwtBandpass`.

    Scales run log-uniformly from ``2 / lam_min`` down to ``1 / lambda_upper``
    with ``lam_min = lambda_upper / lpfactor``. Not designed to be tight;
    ``frame_constant`` is the mean of ``G`` on the interval.
    """
    if M < 2:
        raise ParameterError("need M >= 2")
    lmin = lambda_upper / lpfactor
    scales = np.exp(np.linspace(math.log(2.0 / lmin), math.log(1.0 / lambda_upper), M - 1))
    kernels = [SgwtLowpass(SgwtBandpass.peak(), lmin)] + [SgwtBandpass(float(s)) for s in scales]
    grid = np.linspace(0, lambda_upper, 10_000)
    G = sum(np.asarray(g(grid)) ** 2 for g in kernels)
    meta = {"kind": "sgwt-simplified", "M": M, "lpfactor": lpfactor, "simplified": True}
    return FilterBank(kernels, lambda_upper, float(G.mean()), meta)


def meyer_bank(lambda_upper: float, M: int) -> FilterBank:
    """Dyadic Meyer-type tight bank with ``G = 1`` on ``[0, lambda_upper]``.

    The last wavelet peaks at ``lambda_upper``; the scaling kernel is flat up
    to ``lambda_upper / 2^(M-1)``.
    """
    if M < 2:
        raise ParameterError("need M >= 2")
    a = lambda_upper / 2 ** (M - 1)
    kernels = [MeyerScaling(a)] + [MeyerWavelet(a * 2 ** (j - 1)) for j in range(1, M)]
    meta = {"kind": "meyer-simplified", "M": M, "simplified": True}
    return FilterBank(kernels, lambda_upper, 1.0, meta)


def baseline_banks(lambda_upper: float, d_max: float, M: int = 8, R: int = 3,
                   window: CosineWindow | None = None, warp0=None,
                   eigenvalues=None) -> dict[str, FilterBank]:
    """The five comparison banks, keyed by label.

    ``sgwt`` and ``meyer`` are simplified stand-ins; ``meyer-degree`` warps
    ``meyer`` by ``C arccos(1 - lam / d_max)``; ``log`` is the log-warped
    wavelet bank; ``spectrum-adapted`` composes the log warp with ``warp0``,
    which defaults to ``lambda_upper`` times the monotone-cubic interpolant
    of the exact spectral CDF (``eigenvalues`` is then required).
    """
    if not d_max >= lambda_upper / 2:
        raise ParameterError("degree-adapted warp needs d_max >= lambda_upper / 2")
    window = window or make_hann()
    if warp0 is None:
        if eigenvalues is None:
            raise ParameterError("pass warp0 or the eigenvalues to build it from")
        cdf = interpolate(exact_cdf_points(eigenvalues), "monotone-cubic")
        warp0 = _ScaledWarp(cdf, lambda_upper)
    meyer = meyer_bank(lambda_upper, M)
    arccos = ArccosWarp(lambda_upper, d_max)
    degree = FilterBank([Warped(g, arccos) for g in meyer.kernels], lambda_upper, 1.0,
                        dict(meyer.meta, kind="meyer-degree-simplified", d_max=d_max))
    return {
        "sgwt": sgwt_bank(lambda_upper, M),
        "meyer": meyer,
        "meyer-degree": degree,
        "log": log_wavelet_bank(window, lambda_upper, M, R),
        "spectrum-adapted": spectrum_adapted_wavelet_bank(window, warp0, lambda_upper, M, R),
    }


@dataclass(frozen=True)
class _ScaledWarp:
    """``factor * inner(lam)``."""

    inner: object
    factor: float

    def __call__(self, lam):
        return self.factor * np.asarray(self.inner(lam), dtype=float)


# -- vertex-frequency pipeline --------------------------------------------


def spectral_clustering(eig: EigenDecomposition, n_clusters: int = 5, restarts: int = 50,
                        seed: int = 0) -> np.ndarray:
    """k-means on the first ``n_clusters`` nontrivial eigenvectors; best of ``restarts`` runs.

    Labels are renumbered by first appearance so the output does not depend
    on k-means' internal cluster order.
    """
    X = eig.eigenvectors[:, 1:n_clusters + 1]
    rng = np.random.default_rng(seed)
    best, best_cost = None, np.inf
    for _ in range(restarts):
        centers, labels = kmeans2(X, n_clusters, minit="++", seed=rng)
        cost = float(((X - centers[labels]) ** 2).sum())
        if cost < best_cost - 1e-12 and len(np.unique(labels)) == n_clusters:
            best, best_cost = labels, cost
    if best is None:
        raise DataError("k-means produced empty clusters on every restart")
    _, first = np.unique(best, return_index=True)
    order = np.argsort(first)
    remap = np.empty(n_clusters, dtype=int)
    remap[order] = np.arange(n_clusters)
    return remap[best]


def synthesize_test_signal(eig: EigenDecomposition, labels, bands=DEMO_BANDS) -> np.ndarray:
    """``sum_j f_j / ||f_j||_inf`` where ``f_j`` is the band-``j`` eigenvector sum restricted to cluster ``j``."""
    labels = np.asarray(labels)
    lam = eig.eigenvalues
    f = np.zeros(eig.n)
    for j, (lo, hi) in enumerate(bands):
        sel = (lam >= lo) & (lam <= hi)
        fj = np.where(labels == j, eig.eigenvectors[:, sel].sum(axis=1), 0.0)
        peak = np.abs(fj).max()
        if peak == 0:
            raise DataError(f"band [{lo}, {hi}] on cluster {j} gives a zero component")
        f += fj / peak
    return f


@dataclass(frozen=True, eq=False)
class VertexFrequencyResult:
    labels: np.ndarray
    signal: np.ndarray
    bank: FilterBank
    cdf: object
    lambda_upper: float
    coefficients: np.ndarray
    A: float
    B: float
    energy_ratio: float
    filter_energy: np.ndarray
    eig: EigenDecomposition = field(repr=False)

    @property
    def energy_fraction(self) -> np.ndarray:
        return self.filter_energy / self.filter_energy.sum()


def vertex_frequency_demo(graph, M: int = 15, R: int = 3, Q: int = 20, bands=DEMO_BANDS,
                          n_clusters: int = 5, seed: int = 0,
                          window: CosineWindow | None = None,
                          lambda_upper: float | None = None,
                          ordering: str = "min-degree") -> VertexFrequencyResult:
    """Cluster, synthesize the banded test signal, build a sliced-CDF warped bank and analyze.

    The bank is ``M`` uniform translates on ``[0, 1]`` precomposed with the
    monotone-cubic interpolant of the sliced spectral CDF. ``lambda_upper``
    defaults to a power-method estimate.
    """
    from .graphs import laplacian
    from .kernels import uniform_translates, warp_bank
    from .linalg import estimate_lambda_upper
    from .warping import sliced_cdf

    if not graph.is_connected():
        raise DataError("the vertex-frequency demo needs a connected graph")
    window = window or make_hann()
    L = laplacian(graph, "combinatorial")
    S = SparseSym.from_matrix(L.matrix)
    eig = dense_eigh(L.matrix)
    if lambda_upper is None:
        lambda_upper = estimate_lambda_upper(S, "power", seed=seed)
    if lambda_upper < eig.lambda_max:
        raise ParameterError(
            f"lambda_upper {lambda_upper:g} is below lambda_max {eig.lambda_max:g}")
    labels = spectral_clustering(eig, n_clusters, seed=seed)
    f = synthesize_test_signal(eig, labels, bands)
    cdf = sliced_cdf(S, lambda_upper, Q, ordering)
    warp = interpolate(cdf, "monotone-cubic")
    bank = warp_bank(uniform_translates(window, 1.0, M, R), warp, lambda_upper)
    bank.meta.update(kind="sliced-cdf-warped", Q=Q)
    c = analyze(eig, bank, f)
    A, B = frame_bounds(eig, bank)
    energy = (c ** 2).sum(axis=0)
    ratio = float(energy.sum() / (A * float(f @ f)))
    return VertexFrequencyResult(labels, f, bank, cdf, float(lambda_upper), c, A, B, ratio,
                                 energy, eig)
