"""Warping functions and spectral CDF estimates.

Every warping function is a nondecreasing callable on ``[0, lambda_upper]``.
Spectrum-adapted warps come from one of three sources: interpolated knots of
the exact (or subsampled) spectrum, knots obtained by counting eigenvalues
below a grid of shifts with sparse LDL^T factorizations, or closed-form
limiting spectral laws of random graph families.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import wofz

from .errors import DataError, NumericalError, ParameterError
from .linalg import SparseSym, ldl_numeric, ldl_symbolic

__all__ = [
    "Identity",
    "Affine",
    "LogWarp",
    "ArccosWarp",
    "PiecewiseLinear",
    "MonotoneCubic",
    "McKayCdf",
    "ErNormalizedCdf",
    "ErCombinatorialCdf",
    "Composite",
    "CdfEstimate",
    "SliceReport",
    "exact_cdf_points",
    "interpolate",
    "fritsch_carlson_slopes",
    "sliced_cdf",
    "mckay_cdf",
    "mckay_density",
    "er_normalized_cdf",
    "er_normalized_density",
    "er_combinatorial_cdf",
    "free_convolution_density",
    "normalize_warp",
    "is_nondecreasing",
]


@dataclass(frozen=True)
class Identity:
    def __call__(self, lam):
        return np.asarray(lam, dtype=float)


@dataclass(frozen=True)
class Affine:
    """``a * lam + b``."""

    a: float
    b: float = 0.0

    def __call__(self, lam):
        return self.a * np.asarray(lam, dtype=float) + self.b


@dataclass(frozen=True)
class LogWarp:
    """``log(lam)``, with ``-inf`` at and below ``floor``."""

    floor: float = 0.0

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        out = np.full(lam.shape, -np.inf)
        ok = lam > self.floor
        out[ok] = np.log(lam[ok])
        return out


@dataclass(frozen=True)
class ArccosWarp:
    """``C arccos(1 - lam / d_max)`` scaled so that ``lambda_upper`` maps to itself."""

    lambda_upper: float
    d_max: float

    def __post_init__(self):
        if not self.d_max >= self.lambda_upper / 2:
            raise ParameterError("degree-adapted warp needs d_max >= lambda_upper / 2")

    @property
    def C(self) -> float:
        return self.lambda_upper / math.acos(1 - self.lambda_upper / self.d_max)

    def __call__(self, lam):
        x = np.clip(1 - np.asarray(lam, dtype=float) / self.d_max, -1.0, 1.0)
        return self.C * np.arccos(x)


@dataclass(frozen=True)
class Composite:
    """``outer(inner(lam))``."""

    outer: Callable
    inner: Callable

    def __call__(self, lam):
        return self.outer(self.inner(lam))


def _check_knots(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise DataError("knot arrays must be 1-D and of equal length")
    if len(x) < 2:
        raise DataError("at least two knots are required")
    if np.any(np.diff(x) <= 0):
        raise DataError("knot abscissae must be strictly increasing")
    if np.any(np.diff(y) < 0):
        raise DataError("knot values must be nondecreasing")
    return x, y


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x, y = _check_knots(self.x, self.y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __call__(self, lam):
        return np.interp(np.asarray(lam, dtype=float), self.x, self.y)


def fritsch_carlson_slopes(x, y) -> np.ndarray:
    """Knot derivatives for a monotone piecewise cubic Hermite interpolant.

    Initial slopes are averaged secants (one-sided at the ends); a second
    pass zeroes slopes next to flat intervals and rescales any pair
    ``(alpha, beta)`` falling outside the circle of radius 3.
    """
    x, y = _check_knots(x, y)
    h = np.diff(x)
    delta = np.diff(y) / h
    m = np.empty(len(x))
    m[0] = delta[0]
    m[-1] = delta[-1]
    m[1:-1] = (delta[:-1] + delta[1:]) / 2
    # secants of opposite sign cannot occur for nondecreasing data
    for k in range(len(delta)):
        if delta[k] == 0.0:
            m[k] = 0.0
            m[k + 1] = 0.0
            continue
        # |(alpha, beta)| > 3, written without dividing by a possibly tiny secant
        r = math.hypot(m[k], m[k + 1])
        if r > 3.0 * delta[k]:
            m[k] = 3.0 * delta[k] * (m[k] / r)
            m[k + 1] = 3.0 * delta[k] * (m[k + 1] / r)
    return m


@dataclass(frozen=True, eq=False)
class MonotoneCubic:
    """Cubic Hermite interpolant; held constant outside the knot range."""

    x: np.ndarray
    y: np.ndarray
    slopes: np.ndarray

    def __post_init__(self):
        x, y = _check_knots(self.x, self.y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "slopes", np.asarray(self.slopes, dtype=float))

    @classmethod
    def fit(cls, x, y) -> "MonotoneCubic":
        return cls(x, y, fritsch_carlson_slopes(x, y))

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        x, y, m = self.x, self.y, self.slopes
        t_in = np.clip(lam, x[0], x[-1])
        k = np.clip(np.searchsorted(x, t_in, side="right") - 1, 0, len(x) - 2)
        h = x[k + 1] - x[k]
        t = (t_in - x[k]) / h
        t2 = t * t
        t3 = t2 * t
        h00 = 2 * t3 - 3 * t2 + 1
        h10 = t3 - 2 * t2 + t
        h01 = -2 * t3 + 3 * t2
        h11 = t3 - t2
        out = h00 * y[k] + h10 * h * m[k] + h01 * y[k + 1] + h11 * h * m[k + 1]
        # knots are reproduced exactly
        out = np.where(t == 0, y[k], out)
        out = np.where(t == 1, y[k + 1], out)
        return out


@dataclass(frozen=True, eq=False)
class CdfEstimate:
    """Knots ``(x_q, P_q)`` of a spectral CDF estimate.

    ``counts`` holds the integer eigenvalue counts behind each knot when
    they are known (sliced and exact estimates).
    """

    x: np.ndarray
    values: np.ndarray
    provenance: str
    counts: np.ndarray | None = None
    n: int | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.shape != v.shape or x.ndim != 1 or len(x) < 2:
            raise DataError("CDF knots must be two 1-D arrays of equal length >= 2")
        if np.any(np.diff(x) <= 0):
            raise DataError("CDF abscissae must be strictly increasing")
        if np.any(np.diff(v) < 0) or v[0] != 0.0 or v[-1] != 1.0:
            raise DataError("CDF values must be nondecreasing from 0 to 1")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.x)

    @property
    def lambda_upper(self) -> float:
        return float(self.x[-1])

    def to_csv(self, path, extra_header: dict | None = None):
        path = Path(path)
        with open(path, "w", newline="") as fh:
            fh.write(f"# provenance: {self.provenance}\n")
            for k, v in (extra_header or {}).items():
                fh.write(f"# {k}: {v}\n")
            w = csv.writer(fh)
            w.writerow(["x", "value"])
            for a, b in zip(self.x, self.values):
                w.writerow([repr(float(a)), repr(float(b))])

    @classmethod
    def from_csv(cls, path) -> "CdfEstimate":
        provenance = "unknown"
        xs, vs = [], []
        with open(path, newline="") as fh:
            for lineno, line in enumerate(fh, 1):
                s = line.strip()
                if not s:
                    continue
                if s.startswith("#"):
                    if s[1:].strip().startswith("provenance:"):
                        provenance = s.split(":", 1)[1].strip()
                    continue
                if s.lower().startswith("x,"):
                    continue
                try:
                    a, b = s.split(",")
                    xs.append(float(a))
                    vs.append(float(b))
                except ValueError:
                    raise DataError(f"{path}:{lineno}: expected 'x,value'") from None
        return cls(np.array(xs), np.array(vs), provenance)


def exact_cdf_points(eigenvalues, indices=None, tol: float | None = None) -> CdfEstimate:
    """Knots ``(lam_l, l / (N - 1))`` of the exact spectrum.

    Repeated eigenvalues (within ``tol``, default ``1e-9 * max(1, lam_max)``)
    collapse onto the knot of their highest index. The first knot is pinned
    to ``(0, 0)`` and the last to ``(lam_max, 1)``. ``indices`` selects a
    subsample ``lam_{i_0}, lam_{i_1}, ...`` whose knots become
    ``(lam_{i_j}, j / (len(indices) - 1))``.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.ndim != 1 or len(lam) < 2:
        raise DataError("need at least two eigenvalues")
    if np.any(np.diff(lam) < -1e-12 * max(1.0, abs(lam[-1]))):
        raise DataError("eigenvalues must be sorted ascending")
    provenance = "exact-spectrum"
    if indices is not None:
        idx = np.asarray(indices, dtype=int)
        if np.any(np.diff(idx) <= 0) or idx[0] < 0 or idx[-1] >= len(lam):
            raise ParameterError("indices must be strictly increasing and in range")
        lam = lam[idx]
        provenance = "subsampled"
    if tol is None:
        tol = 1e-9 * max(1.0, abs(lam[-1]))
    n = len(lam)
    lam = np.where(np.abs(lam) <= tol, 0.0, lam)
    # keep the last member of every cluster of (numerically) equal eigenvalues
    last = np.append(np.diff(lam) > tol, True)
    keep = np.flatnonzero(last)
    x = lam[keep]
    counts = keep + 1
    v = keep / (n - 1)
    if x[0] == 0.0:
        v[0] = 0.0
    else:
        x = np.concatenate([[0.0], x])
        v = np.concatenate([[0.0], v])
        counts = np.concatenate([[0], counts])
    if len(x) < 2:
        raise DataError("spectrum collapses to a single point")
    return CdfEstimate(x, v, provenance, counts=counts, n=n)


def interpolate(points: CdfEstimate, method: str = "monotone-cubic"):
    if method == "linear":
        return PiecewiseLinear(points.x, points.values)
    if method in ("monotone-cubic", "pchip", "cubic"):
        return MonotoneCubic.fit(points.x, points.values)
    raise ParameterError(f"unknown interpolation method {method!r}")


@dataclass(frozen=True, eq=False)
class SliceReport:
    """Per-shift detail of :func:`sliced_cdf`."""

    shifts: np.ndarray
    shifts_used: np.ndarray
    counts: np.ndarray
    nudged: tuple[int, ...] = ()
    nnz_l: int = 0


def sliced_cdf(laplacian, lambda_upper: float, Q: int, ordering: str = "min-degree",
               max_nudges: int = 5, return_report: bool = False):
    """Spectral CDF knots from eigenvalue counts below ``Q - 1`` shifts.

    For ``q = 1..Q-1`` the count ``mu_q`` of eigenvalues below
    ``x_q = q lambda_upper / Q`` is the number of negative pivots in an
    ``LDL^T`` factorization of ``L - x_q I``; the symbolic analysis is shared
    by every shift. ``mu_0 = 0`` and ``mu_Q = N - 1`` are assigned without
    factorizing. Knot values are ``mu_q / (N - 1)``, capped at 1.

    A shift that produces a pivot within ``1e-9`` (relative) of zero sits on
    or next to an eigenvalue; it is moved up by ``1e-8 * lambda_upper`` and
    refactorized, so such an eigenvalue is counted.
    """
    if Q < 2:
        raise ParameterError("Q must be >= 2")
    if not lambda_upper > 0:
        raise ParameterError("lambda_upper must be positive")
    if isinstance(laplacian, SparseSym):
        A = laplacian
    else:
        A = SparseSym.from_matrix(getattr(laplacian, "matrix", laplacian))
    n = A.n
    sym = ldl_symbolic(A, ordering)
    scale = max(A.max_abs(), 1.0)
    shifts = np.arange(Q + 1) * lambda_upper / Q
    used = shifts.copy()
    counts = np.zeros(Q + 1, dtype=np.int64)
    counts[Q] = n - 1
    nudged = []
    for q in range(1, Q):
        s = shifts[q]
        for attempt in range(max_nudges + 1):
            try:
                fac = ldl_numeric(sym, A.shifted(s))
            except NumericalError as exc:
                raise NumericalError(f"factorization failed at shift {s:.17g}: {exc}") from None
            if not fac.perturbed and np.abs(fac.d).min() > 1e-9 * scale:
                break
            if attempt == max_nudges:
                raise NumericalError(f"shift {shifts[q]:.17g} stays singular after nudging")
            s += 1e-8 * lambda_upper
        if s != shifts[q]:
            nudged.append(q)
        used[q] = s
        counts[q] = fac.n_negative
    values = np.minimum(counts, n - 1) / (n - 1)
    values = np.maximum.accumulate(values)
    est = CdfEstimate(shifts, values, "inertia-sliced", counts=counts, n=n)
    if return_report:
        return est, SliceReport(shifts, used, counts, tuple(nudged), sym.nnz_l)
    return est


def mckay_density(s, r: int):
    s = np.asarray(s, dtype=float)
    u = s - r
    rad = 4 * (r - 1) - u * u
    out = np.zeros_like(s)
    ok = rad > 0
    out[ok] = r * np.sqrt(rad[ok]) / (2 * np.pi * (r * r - u[ok] ** 2))
    return out


@dataclass(frozen=True)
class McKayCdf:
    """Limiting Laplacian spectral CDF of random ``r``-regular graphs."""

    r: int

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 3:
            raise ParameterError("McKay's law needs an integer degree r >= 3")

    @property
    def support(self) -> tuple[float, float]:
        w = 2 * math.sqrt(self.r - 1)
        return (self.r - w, self.r + w)

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        r = self.r
        lo, hi = self.support
        u = np.clip(z, lo, hi) - r
        root = np.sqrt(np.maximum(4 * (r - 1) - u * u, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            atan = np.arctan2((r - 2) * u, r * root)
        val = (0.5 + r / (2 * np.pi) * np.arcsin(np.clip(u / (2 * math.sqrt(r - 1)), -1, 1))
               - (r - 2) / (2 * np.pi) * atan)
        val = np.where(z <= lo, 0.0, np.where(z >= hi, 1.0, val))
        return np.clip(val, 0.0, 1.0)


def mckay_cdf(r: int) -> McKayCdf:
    return McKayCdf(r)


def er_normalized_density(s, n: int, p: float):
    s = np.asarray(s, dtype=float)
    c = math.sqrt(p * n / (1 - p))
    rad = 4 - (c * (1 - s)) ** 2
    return np.where(rad > 0, c / (2 * np.pi) * np.sqrt(np.maximum(rad, 0)), 0.0)


@dataclass(frozen=True)
class ErNormalizedCdf:
    """Semicircle approximation of the normalized-Laplacian spectral CDF of G(n, p)."""

    n: int
    p: float

    def __post_init__(self):
        if not 0 < self.p < 1 or self.n < 2:
            raise ParameterError("need 0 < p < 1 and n >= 2")

    @property
    def radius(self) -> float:
        return 2 * math.sqrt((1 - self.p) / (self.p * self.n))

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        c = math.sqrt(self.p * self.n / (1 - self.p))
        x = np.clip(c * (z - 1), -2.0, 2.0)
        return 0.5 + x * np.sqrt(4 - x * x) / (4 * np.pi) + np.arcsin(x / 2) / np.pi


def er_normalized_cdf(n: int, p: float) -> ErNormalizedCdf:
    return ErNormalizedCdf(n, p)


def _gauss_cauchy(w):
    """Cauchy transform of the standard normal law for ``Im w > 0``."""
    return -1j * math.sqrt(math.pi / 2) * wofz(w / math.sqrt(2))


def free_convolution_density(x, eta: float = 1e-3, tol: float = 1e-10, maxiter: int = 500):
    """Density of (standard normal) boxplus (semicircle on [-2, 2]) at ``x + i eta``.

    Subordination: the Cauchy transform ``G`` of the convolution satisfies
    ``G(z) = G_A(z - G(z))`` with ``G_A`` the Gaussian transform. The fixed
    point is found by Newton's method, warm-started along a decreasing
    sequence of imaginary parts. Returns ``(density, G)``.
    """
    x = np.asarray(x, dtype=float)
    etas = [e for e in (1.0, 0.3, 0.1, 0.03, 0.01, 3e-3) if e > eta] + [eta]
    z = x + 1j * etas[0]
    G = 1.0 / z
    for e in etas:
        z = x + 1j * e
        for _ in range(maxiter):
            w = z - G
            ga = _gauss_cauchy(w)
            F = G - ga
            dF = 2.0 - w * ga  # 1 + G_A'(w), with G_A'(w) = 1 - w G_A(w)
            step = F / dF
            G_new = G - step
            # stay in the lower half plane where Cauchy transforms live
            bad = G_new.imag > 0
            if np.any(bad):
                G_new[bad] = (G[bad] + ga[bad]) / 2
            change = np.abs(G_new - G)
            G = G_new
            if np.all(change <= tol * np.abs(G)):
                break
        else:
            worst = int(np.argmax(change / np.abs(G)))
            raise NumericalError(
                f"subordination did not converge at x={x.flat[worst]:.6g}, eta={e:g}")
    return -G.imag / math.pi, G


@dataclass(frozen=True, eq=False)
class ErCombinatorialCdf:
    """Free-convolution approximation of the combinatorial-Laplacian CDF of G(n, p).

    The unscaled CDF ``F`` is tabulated on ``grid`` (in units of
    ``(lam - p n) / sqrt(p n (1 - p))``) and evaluated by linear
    interpolation; the result is rescaled so that ``F(lambda_upper) = 1``.
    ``mass_below_zero`` is the value at ``lam = 0``.
    """

    n: int
    p: float
    grid: np.ndarray
    cdf_table: np.ndarray
    lambda_upper: float
    density_table: np.ndarray | None = field(default=None, repr=False)

    @property
    def center(self) -> float:
        return self.p * self.n

    @property
    def scale(self) -> float:
        return math.sqrt(self.p * self.n * (1 - self.p))

    def unscaled(self, x):
        return np.interp(np.asarray(x, dtype=float), self.grid, self.cdf_table)

    def __call__(self, z):
        x = (np.asarray(z, dtype=float) - self.center) / self.scale
        top = self.unscaled((self.lambda_upper - self.center) / self.scale)
        return np.minimum(self.unscaled(x) / top, 1.0)

    @property
    def mass_below_zero(self) -> float:
        return float(self(np.array([0.0]))[0])


def er_combinatorial_cdf(n: int, p: float, eta: float = 1e-3, grid=None,
                         lambda_upper: float | None = None) -> ErCombinatorialCdf:
    """Build :class:`ErCombinatorialCdf` by Stieltjes inversion of the subordination solution.

    The default grid has 4001 points on ``[-6, 6]`` and is widened to include
    the scaled images of ``0`` and ``lambda_upper``
    (default ``p n + 4 sqrt(p n (1 - p))``). The mass of the regularized
    density to the left of the grid is ``-(eta / pi) Re G`` at the left end
    (the Poisson-kernel tail) and is added to the first table entry.
    """
    if not 0 < p < 1 or n < 2:
        raise ParameterError("need 0 < p < 1 and n >= 2")
    center = p * n
    scale = math.sqrt(p * n * (1 - p))
    if lambda_upper is None:
        lambda_upper = center + 4 * scale
    if grid is None:
        lo = min(-6.0, (0.0 - center) / scale)
        hi = max(6.0, (lambda_upper - center) / scale)
        step = 12.0 / 4000
        grid = np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)
    grid = np.asarray(grid, dtype=float)
    dens, G = free_convolution_density(grid, eta)
    tail = max(-(eta / math.pi) * G[0].real, 0.0)
    steps = np.diff(grid) * (dens[1:] + dens[:-1]) / 2
    cdf = tail + np.concatenate([[0.0], np.cumsum(steps)])
    return ErCombinatorialCdf(n, p, grid, cdf, float(lambda_upper), dens)


def normalize_warp(w, lambda_upper: float, target_gamma: float):
    """Affine post-composition mapping ``[w(0), w(lambda_upper)]`` onto ``[0, target_gamma]``."""
    ends = np.asarray(w(np.array([0.0, lambda_upper])), dtype=float)
    lo, hi = float(ends[0]), float(ends[1])
    if not hi > lo:
        raise ParameterError("warp is constant on [0, lambda_upper]")
    a = target_gamma / (hi - lo)
    if lo == 0.0 and a == 1.0:
        return w
    return Composite(Affine(a, -a * lo), w)


def is_nondecreasing(w, lambda_upper: float, n_points: int = 10_000, tol: float = 1e-12) -> bool:
    v = np.asarray(w(np.linspace(0, lambda_upper, n_points)), dtype=float)
    return bool(np.all(np.diff(v) >= -tol))
