"""Spectral kernels and filter banks.

A kernel is any callable mapping an array of spectral values to an array of
filter values. The classes here are immutable building blocks that compose:

* :class:`CosineBase` -- a shifted and scaled cosine-sum window,
* :class:`Warped` -- a kernel precomposed with a warping function,
* :class:`ScalingComplement` -- ``sqrt(C - sum_m g_m^2)`` for a set of members,
* :class:`ChebyshevApprox` -- a truncated Chebyshev series on an interval.

Cosine-sum windows ``q(t) = sum_k a_k cos(2 pi k (t - 1/2))`` on ``[0, 1)``
have the property that the squares of their translates by ``1/R`` sum to the
constant ``R a_0^2 + R/2 sum_{k>=1} a_k^2`` whenever ``R > 2K``. Uniformly
translated banks inherit that constant on the whole design interval, and so
do their warped versions.

On smoothness: the window extended by zero is ``C^(2s-1)`` when
``sum_k (-1)^k k^(2i) a_k = 0`` for ``i = 0..s-1`` (odd derivatives vanish at
both ends automatically). These are ``K`` homogeneous equations in ``K + 1``
unknowns, so a nonzero ``C^(2K-1)`` window exists for every ``K``;
:func:`smoothness_constraints` returns the matrix and :func:`window_smoothness`
reports the order reached by a given coefficient vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConstructionError, NumericalError, ParameterError

__all__ = [
    "CosineWindow",
    "make_hann",
    "make_blackman",
    "smoothness_constraints",
    "window_smoothness",
    "translate_identity_check",
    "CosineBase",
    "Warped",
    "ScalingComplement",
    "ConstantKernel",
    "ChebyshevApprox",
    "FilterBank",
    "uniform_translates",
    "warp_bank",
    "log_wavelet_bank",
    "spectrum_adapted_wavelet_bank",
    "chebyshev_fit",
    "eval_kernel",
]

Kernel = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CosineWindow:
    coefficients: tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(c) for c in self.coefficients)
        if not a:
            raise ParameterError("a window needs at least one coefficient")
        object.__setattr__(self, "coefficients", a)
        alt = sum((-1) ** k * c for k, c in enumerate(a))
        if abs(alt) > 1e-12 * sum(abs(c) for c in a):
            raise ParameterError(
                f"window is discontinuous: sum (-1)^k a_k = {alt:.3g} must be 0")

    @property
    def K(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= 0) & (t < 1)
        arg = 2 * np.pi * (np.where(inside, t, 0.5) - 0.5)
        val = np.zeros_like(arg)
        for k, a in enumerate(self.coefficients):
            val += a * np.cos(k * arg)
        return np.where(inside, val, 0.0)

    def frame_constant(self, R: int) -> float:
        a = self.coefficients
        return R * a[0] ** 2 + R / 2 * sum(c * c for c in a[1:])


def make_hann() -> CosineWindow:
    return CosineWindow((0.5, 0.5))


def make_blackman() -> CosineWindow:
    return CosineWindow((0.42, 0.5, 0.08))


def smoothness_constraints(K: int) -> np.ndarray:
    """Rows ``i = 0..K-1`` of the ``K x (K+1)`` system ``sum_k (-1)^k k^(2i) a_k = 0``."""
    k = np.arange(K + 1)
    return np.array([(-1.0) ** k * k ** (2 * i) for i in range(K)])


def window_smoothness(window: CosineWindow, tol: float = 1e-12) -> int | float:
    """Largest ``n`` such that the zero-extended window is ``C^n`` (-1 if discontinuous)."""
    a = np.asarray(window.coefficients)
    k = np.arange(len(a))
    scale = np.abs(a).sum()
    s = 0
    while s <= window.K:
        residual = np.sum((-1.0) ** k * k ** (2 * s) * a)
        if abs(residual) > tol * scale * max(1, window.K) ** (2 * s):
            break
        s += 1
    if s > window.K:
        return math.inf  # only the zero window satisfies every constraint
    return 2 * s - 1


def translate_identity_check(window: CosineWindow, R: int, n_points: int = 10_000,
                             rtol: float = 1e-12) -> float:
    """Evaluate ``sum_m q(t - m/R)^2`` on a grid and return its constant value."""
    if R <= 2 * window.K:
        raise ParameterError(f"need R > 2K, got R={R}, K={window.K}")
    t = np.linspace(0.0, 1.0, n_points, endpoint=False)
    total = np.zeros_like(t)
    for m in range(-R, R + 1):
        total += window(t - m / R) ** 2
    target = window.frame_constant(R)
    dev = np.abs(total - target).max() / target
    if dev > rtol:
        raise NumericalError(f"translates are not flat: relative deviation {dev:.3g}")
    return float(total.mean())


@dataclass(frozen=True)
class CosineBase:
    """``window((lam - shift) / scale)``, supported on ``[shift, shift + scale)``."""

    window: CosineWindow
    shift: float
    scale: float

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        return self.window((lam - self.shift) / self.scale)

    @property
    def support(self) -> tuple[float, float]:
        return (self.shift, self.shift + self.scale)


@dataclass(frozen=True)
class Warped:
    base: Kernel
    warp: Callable

    def __call__(self, lam):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.base(self.warp(np.asarray(lam, dtype=float)))


@dataclass(frozen=True)
class ConstantKernel:
    value: float = 1.0

    def __call__(self, lam):
        return np.full(np.shape(lam), self.value, dtype=float)


@dataclass(frozen=True)
class ScalingComplement:
    """``sqrt(C - sum_m member_m(lam)^2)``.

    Radicands down to ``-clamp * C`` are treated as rounding error and
    clamped to zero; anything more negative raises :class:`NumericalError`.
    """

    members: tuple
    frame_constant: float
    clamp: float = 1e-12

    def radicand(self, lam):
        lam = np.asarray(lam, dtype=float)
        acc = np.full(lam.shape, float(self.frame_constant))
        for g in self.members:
            acc -= g(lam) ** 2
        return acc

    def __call__(self, lam):
        r = self.radicand(lam)
        floor = -self.clamp * self.frame_constant
        if np.any(r < floor):
            raise NumericalError(
                f"scaling kernel radicand {r.min():.3g} below {floor:.3g}")
        return np.sqrt(np.maximum(r, 0.0))


@dataclass(frozen=True, eq=False)
class ChebyshevApprox:
    """Chebyshev series ``c_0/2 + sum_k c_k T_k(x)`` with ``x`` the affine image of ``lam``."""

    coefficients: np.ndarray
    interval: tuple[float, float]

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def _x(self, lam):
        a, b = self.interval
        return (2 * np.asarray(lam, dtype=float) - (a + b)) / (b - a)

    def __call__(self, lam):
        x = self._x(lam)
        c = self.coefficients
        # Clenshaw recurrence
        b1 = np.zeros_like(x)
        b2 = np.zeros_like(x)
        for ck in c[:0:-1]:
            b1, b2 = 2 * x * b1 - b2 + ck, b1
        return x * b1 - b2 + c[0] / 2

    def apply(self, matrix, f):
        """Matrix-free ``g(A) f`` using only products with ``matrix``."""
        a, b = self.interval
        f = np.asarray(f, dtype=float)
        alpha, beta = 2.0 / (b - a), -(a + b) / (b - a)

        def X(v):
            return alpha * (matrix @ v) + beta * v

        c = self.coefficients
        t_prev = f
        out = c[0] / 2 * f
        if len(c) == 1:
            return out
        t_cur = X(f)
        out = out + c[1] * t_cur
        for ck in c[2:]:
            t_prev, t_cur = t_cur, 2 * X(t_cur) - t_prev
            out = out + ck * t_cur
        return out


def chebyshev_fit(kernel: Kernel, interval: tuple[float, float], order: int) -> ChebyshevApprox:
    """Collocation at the ``order + 1`` Chebyshev points of the first kind."""
    if order < 1:
        raise ParameterError("Chebyshev order must be >= 1")
    a, b = map(float, interval)
    if not b > a:
        raise ParameterError("interval must satisfy a < b")
    n = order + 1
    theta = np.pi * (np.arange(n) + 0.5) / n
    lam = (b - a) / 2 * np.cos(theta) + (a + b) / 2
    vals = np.asarray(kernel(lam), dtype=float)
    k = np.arange(n)
    coeffs = 2.0 / n * np.cos(np.outer(k, theta)) @ vals
    return ChebyshevApprox(coeffs, (a, b))


def eval_kernel(kernel: Kernel, lam):
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ParameterError("kernels are evaluated on lam >= 0")
    return kernel(lam)


@dataclass(frozen=True, eq=False)
class FilterBank:
    """Ordered kernels, their design interval ``[0, lambda_upper]`` and target constant.

    ``meta`` carries construction parameters (window, M, R, gamma, warp
    description) used by serialization and reports.
    """

    kernels: tuple
    lambda_upper: float
    frame_constant: float
    meta: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "kernels", tuple(self.kernels))
        if not self.kernels:
            raise ParameterError("a filter bank needs at least one kernel")
        object.__setattr__(self, "meta", dict(self.meta or {}))

    @property
    def M(self) -> int:
        return len(self.kernels)

    def __len__(self):
        return len(self.kernels)

    def __iter__(self):
        return iter(self.kernels)

    def __getitem__(self, m):
        return self.kernels[m]

    def evaluate(self, lam) -> np.ndarray:
        """Array of shape ``(M,) + lam.shape``."""
        lam = np.asarray(lam, dtype=float)
        return np.stack([np.asarray(g(lam), dtype=float) for g in self.kernels])

    def G(self, lam) -> np.ndarray:
        return (self.evaluate(lam) ** 2).sum(axis=0)

    def tightness_error(self, n_points: int = 10_000) -> float:
        """``max |G - C| / C`` on a uniform grid of ``[0, lambda_upper]``."""
        lam = np.linspace(0, self.lambda_upper, n_points)
        return float(np.abs(self.G(lam) - self.frame_constant).max() / self.frame_constant)


def _check_translate_params(window: CosineWindow, M: int, R: int):
    if not 2 < R <= M:
        raise ParameterError(f"need 2 < R <= M, got R={R}, M={M}")
    if not window.K < R / 2:
        raise ParameterError(f"need K < R/2, got K={window.K}, R={R}")


def uniform_translates(window: CosineWindow, gamma: float, M: int, R: int) -> FilterBank:
    """``M`` translates of one window whose squares sum to a constant on ``[0, gamma]``.

    Kernel ``m`` (1-based) is supported on ``[(m - R) d, m d)`` with
    ``d = gamma / (M + 1 - R)``.
    """
    _check_translate_params(window, M, R)
    if not gamma > 0:
        raise ParameterError("gamma must be positive")
    d = gamma / (M + 1 - R)
    kernels = [CosineBase(window, (m - R) * d, R * d) for m in range(1, M + 1)]
    meta = {"kind": "uniform", "window": list(window.coefficients), "M": M, "R": R,
            "gamma": gamma}
    return FilterBank(kernels, gamma, window.frame_constant(R), meta)


def _check_warp_range(warp, lambda_upper: float, gamma: float, n_points: int = 10_000):
    lam = np.linspace(0, lambda_upper, n_points)
    w = np.asarray(warp(lam), dtype=float)
    tol = 1e-9 * max(1.0, abs(gamma))
    if np.any(~np.isfinite(w)) or w.min() < -tol or w.max() > gamma + tol:
        raise ParameterError(
            f"warp must map [0, {lambda_upper:g}] into [0, {gamma:g}]; "
            f"observed range [{np.nanmin(w):.6g}, {np.nanmax(w):.6g}]")
    if np.any(np.diff(w) < -1e-12 * max(1.0, abs(gamma))):
        raise ParameterError("warp is not nondecreasing")


def warp_bank(bank: FilterBank, warp, lambda_upper: float, check: bool = True) -> FilterBank:
    """Precompose every kernel with ``warp``; ``warp`` maps ``[0, lambda_upper]`` into the bank's interval."""
    if check:
        _check_warp_range(warp, lambda_upper, bank.lambda_upper)
    kernels = [Warped(g, warp) for g in bank.kernels]
    meta = dict(bank.meta, kind="warped", base_lambda_upper=bank.lambda_upper)
    return FilterBank(kernels, lambda_upper, bank.frame_constant, meta)


def _wavelet_bank(window, warp, gamma, lambda_upper, M, R, kind):
    if M < 2:
        raise ParameterError("a wavelet bank needs M >= 2 (one scaling kernel)")
    translates = uniform_translates(window, gamma, M - 1, R)
    wavelets = [Warped(g, warp) for g in translates.kernels]
    C = translates.frame_constant
    scaling = ScalingComplement(tuple(wavelets), C)
    grid = np.linspace(0, lambda_upper, 10_000)
    r = scaling.radicand(grid)
    if r.min() < -1e-9 * C:
        raise ConstructionError(f"wavelet kernels exceed the frame constant (radicand {r.min():.3g})")
    meta = {"kind": kind, "window": list(window.coefficients), "M": M, "R": R,
            "gamma": gamma}
    return FilterBank([scaling, *wavelets], lambda_upper, C, meta)


def log_wavelet_bank(window: CosineWindow, lambda_max: float, M: int, R: int,
                     eps: float | None = None) -> FilterBank:
    """Scaling kernel plus ``M - 1`` log-warped translates.

    The translates are designed on ``[0, log(lambda_max)]`` and evaluated at
    ``log(lam)``; below ``eps`` (default ``1e-4 * lambda_max``) the logarithm is
    taken as ``-inf`` so every wavelet vanishes there, including at 0.
    """
    from .warping import LogWarp

    if not lambda_max > 1:
        raise ParameterError("log warping needs lambda_max > 1 so that log(lambda_max) > 0")
    if eps is None:
        eps = 1e-4 * lambda_max
    warp = LogWarp(floor=eps)
    bank = _wavelet_bank(window, warp, math.log(lambda_max), lambda_max, M, R, "log-wavelet")
    bank.meta["eps"] = eps
    return bank


def spectrum_adapted_wavelet_bank(window: CosineWindow, warp0, lambda_upper: float, M: int,
                                  R: int, eps: float | None = None) -> FilterBank:
    """Wavelet bank warped by ``log(warp0(lam))``.

    ``warp0`` must be nondecreasing with ``warp0(lambda_upper) = lambda_upper``,
    typically ``lambda_upper`` times an estimate of the spectral CDF.
    """
    from .warping import Composite, LogWarp

    if not lambda_upper > 1:
        raise ParameterError("log warping needs lambda_upper > 1")
    end = float(np.asarray(warp0(np.array([lambda_upper])))[0])
    if abs(end - lambda_upper) > 1e-9 * lambda_upper:
        raise ParameterError(f"warp0(lambda_upper) = {end:g}, expected {lambda_upper:g}")
    if eps is None:
        eps = 1e-4 * lambda_upper
    warp = Composite(LogWarp(floor=eps), warp0)
    bank = _wavelet_bank(window, warp, math.log(lambda_upper), lambda_upper, M, R,
                         "spectrum-adapted-wavelet")
    bank.meta["eps"] = eps
    return bank
