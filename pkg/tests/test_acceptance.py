"""Acceptance gate: one test per criterion, each printing a PASS/FAIL summary line."""
import math
import time

import numpy as np
import pytest
from scipy import integrate, stats

from specframes import frames, graphs, kernels, linalg, reproduce, warping
from specframes.datasets import minnesota

pytestmark = pytest.mark.slow


def dense_laplacian(g, kind="combinatorial"):
    return graphs.laplacian(g, kind).matrix.toarray()


def numpy_eig(g, kind="combinatorial"):
    lam, U = np.linalg.eigh(dense_laplacian(g, kind))
    return lam, U


def explicit_atoms(lam, U, bank):
    N = len(lam)
    return np.hstack([math.sqrt(N) * (U * g) @ U.T for g in bank.evaluate(lam)])


def brute_mu1(D, ks):
    D = D / np.linalg.norm(D, axis=0)
    gram = np.abs(D.T @ D)
    np.fill_diagonal(gram, 0.0)
    srt = -np.sort(-gram, axis=1)
    return {k: float(srt[:, :k].sum(axis=1).max()) for k in ks}


def test_criterion_01_translate_constancy(record_criterion):
    t0 = time.perf_counter()
    t = np.linspace(0.0, 1.0, 10_000, endpoint=False)
    worst = 0.0
    for a in ((0.5, 0.5), (0.42, 0.5, 0.08)):
        K = len(a) - 1
        win = kernels.CosineWindow(a)

        def q(s):
            s = np.asarray(s)
            inside = (s >= 0) & (s < 1)
            v = sum(c * np.cos(2 * np.pi * k * (s - 0.5)) for k, c in enumerate(a))
            return np.where(inside, v, 0.0)

        for R in range(2 * K + 1, 13):
            C = R * a[0] ** 2 + R / 2 * sum(c * c for c in a[1:])
            ref = sum(q(t - m / R) ** 2 for m in range(-R, R + 1))
            lib = sum(win(t - m / R) ** 2 for m in range(-R, R + 1))
            worst = max(worst, np.abs(ref - C).max() / C, np.abs(lib - C).max() / C,
                        abs(win.frame_constant(R) - C) / C)
        if K == 1:
            for R in range(3, 13):
                assert win.frame_constant(R) == pytest.approx(3 * R / 8, rel=1e-15)
    secs = time.perf_counter() - t0
    ok = worst <= 1e-12 and secs < 1.0
    record_criterion(1, ok, f"max rel deviation {worst:.2e} (tol 1e-12), {secs:.2f}s (< 1s)")
    assert ok


def test_criterion_02_log_bank_tightness(record_criterion):
    t0 = time.perf_counter()
    gs = {"path-64": graphs.build_path(64), "sensor-64": graphs.build_sensor(64, seed=1),
          "comet-64": graphs.build_comet(64, 30), "ring-3000": graphs.build_ring(3000)}
    rng = np.random.default_rng(2024)
    worst_gap = worst_parseval = 0.0
    for name, g in gs.items():
        lam, U = numpy_eig(g)
        eig = linalg.EigenDecomposition(lam, U)
        bank = kernels.log_wavelet_bank(kernels.make_hann(), float(lam[-1]), 8, 3)
        A, B = frames.frame_bounds(eig, bank)
        worst_gap = max(worst_gap, abs(B - A) / B)
        for _ in range(20):
            f = rng.standard_normal(g.n)
            c = frames.analyze(eig, bank, f)
            if g.n <= 64:
                # independent coefficients from explicit atoms
                c2 = (explicit_atoms(lam, U, bank).T @ f).reshape(bank.M, g.n).T
                np.testing.assert_allclose(c, c2, atol=1e-10)
            worst_parseval = max(worst_parseval, abs((c ** 2).sum() / (A * (f @ f)) - 1))
    secs = time.perf_counter() - t0
    ok = worst_gap <= 1e-9 and worst_parseval <= 1e-9 and secs < 120
    record_criterion(2, ok, f"|B-A|/B {worst_gap:.2e}, Parseval err {worst_parseval:.2e} "
                            f"(tol 1e-9), {secs:.1f}s (< 120s)")
    assert ok


def test_criterion_03_inertia_slicing(record_criterion):
    t0 = time.perf_counter()
    gs = {"path-64": graphs.build_path(64), "comet-64": graphs.build_comet(64, 30),
          "sensor-64": graphs.build_sensor(64, seed=1), "minnesota": minnesota()}
    Q = 20
    mismatches = {}
    dense_secs = 0.0
    for name, g in gs.items():
        S = linalg.SparseSym.from_matrix(graphs.laplacian(g).matrix)
        lu = linalg.estimate_lambda_upper(S, "anderson-morley")
        _, rep = warping.sliced_cdf(S, lu, Q, return_report=True)
        td = time.perf_counter()
        lam = np.linalg.eigvalsh(dense_laplacian(g))
        dense_secs += time.perf_counter() - td
        dense = np.array([(lam < s).sum() for s in rep.shifts_used[1:Q]])
        mismatches[name] = int((dense != rep.counts[1:Q]).sum())
    secs = time.perf_counter() - t0 - dense_secs
    ok = all(v == 0 for v in mismatches.values()) and secs < 120
    record_criterion(3, ok, f"count mismatches {mismatches}, slicing {secs:.1f}s (< 120s)")
    assert ok


def test_criterion_04_ring_warp(record_criterion):
    lam = np.linalg.eigvalsh(dense_laplacian(graphs.build_ring(3000)))
    w = warping.interpolate(warping.exact_cdf_points(lam), "monotone-cubic")
    x = np.linspace(0.0, 4.0, 2000)
    dist = float(np.abs(w(x) - np.arccos(1 - x / 2) / np.pi).max())
    ok = dist <= 0.01
    record_criterion(4, ok, f"sup distance {dist:.2e} (tol 1e-2)")
    assert ok


def _cdf_vs_quad(cdf, density, lo, hi, n=41):
    err = 0.0
    for z in np.linspace(lo, hi, n):
        val, _ = integrate.quad(lambda s: float(density(np.array([s]))[0]), lo, z,
                                limit=200, epsabs=1e-13, epsrel=1e-12)
        err = max(err, abs(val - float(cdf(np.array([z]))[0])))
    return err


def test_criterion_05_mckay(record_criterion):
    t0 = time.perf_counter()
    mid = max(abs(float(warping.McKayCdf(r)(np.array([float(r)]))[0]) - 0.5) for r in (3, 4, 5))
    law = warping.McKayCdf(3)
    lo, hi = law.support

    def density(s):  # written out here rather than taken from the package
        s = np.asarray(s)
        r = 3
        rad = 4 * (r - 1) - (s - r) ** 2
        return np.where(rad > 0, r * np.sqrt(np.maximum(rad, 0))
                        / (2 * np.pi * (r * r - (s - r) ** 2)), 0.0)

    quad = _cdf_vs_quad(law, density, lo, hi)
    g = graphs.build_random_regular(3000, 3, seed=0)
    lam = np.linalg.eigvalsh(dense_laplacian(g))
    ks = float(stats.kstest(lam, law).statistic)
    secs = time.perf_counter() - t0
    ok = mid <= 1e-12 and quad <= 1e-6 and ks <= 0.05 and secs < 180
    record_criterion(5, ok, f"midpoint err {mid:.1e} (1e-12), quadrature {quad:.1e} (1e-6), "
                            f"KS {ks:.4f} (0.05), {secs:.1f}s (< 180s)")
    assert ok


def test_criterion_06_er_normalized(record_criterion):
    n, p = 3000, 0.05
    law = warping.ErNormalizedCdf(n, p)
    c = math.sqrt(p * n / (1 - p))

    def density(s):
        x = c * (1 - np.asarray(s))
        return np.where(np.abs(x) < 2, c * np.sqrt(np.maximum(4 - x * x, 0)) / (2 * np.pi), 0.0)

    quad = _cdf_vs_quad(law, density, 1 - 2 / c, 1 + 2 / c)
    lam = np.linalg.eigvalsh(dense_laplacian(graphs.build_erdos_renyi(n, p, 0), "normalized"))
    ks = float(stats.kstest(lam, law).statistic)
    ok = quad <= 1e-6 and ks <= 0.05
    record_criterion(6, ok, f"quadrature {quad:.1e} (1e-6), KS {ks:.4f} (0.05)")
    assert ok


def test_criterion_07_er_combinatorial(record_criterion):
    n, p = 3000, 0.05
    x = np.linspace(-6, 6, 4001)
    dens, _ = warping.free_convolution_density(x)
    mass = float(integrate.trapezoid(dens, x))
    sym = float(np.abs(dens - dens[::-1]).max())
    law = warping.er_combinatorial_cdf(n, p)
    w0 = float(law(np.array([0.0]))[0]) if law.mass_below_zero == 0 else law.mass_below_zero
    lam = np.linalg.eigvalsh(dense_laplacian(graphs.build_erdos_renyi(n, p, 0)))
    ks = float(stats.kstest(lam, law).statistic)
    ok = (abs(mass - 1) <= 1e-3 and sym <= 1e-4 and abs(law.lambda_upper - 197.75) < 0.01
          and 0 < w0 < 5e-3 and ks <= 0.05)
    record_criterion(7, ok, f"mass {mass:.5f} (1 +- 1e-3), asymmetry {sym:.1e} (1e-4), "
                            f"omega(0) {w0:.2e} in (0, 5e-3), KS {ks:.4f} (0.05)")
    assert ok


def test_criterion_08_table_orderings(record_criterion):
    t0 = time.perf_counter()
    M, R = 8, 3
    verdicts = {}
    info = {}
    for name, g in (("path-256", graphs.build_path(256)),
                    ("comet-64", graphs.build_comet(64, 30))):
        lam, U = numpy_eig(g)
        N = g.n
        ks = [int(round(math.sqrt(N))), N]
        banks = frames.baseline_banks(float(lam[-1]), float(g.degrees.max()), M, R,
                                      eigenvalues=lam)
        rows = {}
        for label, bank in banks.items():
            D = explicit_atoms(lam, U, bank)
            norms = np.linalg.norm(D, axis=0)
            zero = int((norms <= 1e-10 * norms.max()).sum())
            mu = None if zero else brute_mu1(D, ks)
            rows[label] = {"zero": zero, "sigma": float(norms.std()),
                           "mu_sqrtN": None if mu is None else mu[ks[0]],
                           "mu_N": None if mu is None else mu[ks[1]]}
        sa = rows["spectrum-adapted"]
        for key in ("mu_sqrtN", "mu_N", "sigma"):
            others = [r[key] for k, r in rows.items() if k != "spectrum-adapted"
                      and r[key] is not None]
            verdicts[f"{name}:{key}"] = sa[key] is not None and all(
                sa[key] <= o * (1 + 1e-9) for o in others)
            info[f"{name}:{key}"] = (sa[key], min(others))
        if name == "comet-64":
            verdicts["comet-64:baseline zero atom"] = any(
                r["zero"] > 0 for k, r in rows.items() if k != "spectrum-adapted")
            verdicts["comet-64:adapted no zero atom"] = sa["zero"] == 0
        else:
            near = (abs(sa["mu_sqrtN"] / 12.9 - 1) <= 0.15, abs(sa["mu_N"] / 34.0 - 1) <= 0.15)
            info["path-256 reference band (informational)"] = near
    secs = time.perf_counter() - t0
    failed = [k for k, v in verdicts.items() if not v]
    ok = not failed and secs < 600
    detail = ("all orderings hold" if not failed else
              "violated: " + ", ".join(f"{k} adapted={info[k][0]:.10g} best other={info[k][1]:.10g}"
                                       if k in info else k for k in failed))
    record_criterion(8, ok, f"{detail}; {secs:.1f}s (< 600s)")
    assert ok, verdicts


def test_criterion_09_chebyshev(record_criterion):
    g = graphs.build_sensor(64, seed=1)
    L = graphs.laplacian(g).matrix
    lam, U = numpy_eig(g)
    bank = kernels.log_wavelet_bank(kernels.make_hann(), float(lam[-1]), 8, 3)
    G = bank.evaluate(lam)
    rng = np.random.default_rng(99)
    worst = worst_kernel = 0.0
    for _ in range(10):
        f = rng.standard_normal(g.n)
        err2 = ref2 = 0.0
        for m, kernel in enumerate(bank.kernels):
            exact = U @ (G[m] * (U.T @ f))
            approx = frames.filter_signal_chebyshev(L, kernel, f, 120, (0.0, float(lam[-1])))
            err2 += float(np.sum((approx - exact) ** 2))
            ref2 += float(np.sum(exact ** 2))
            worst_kernel = max(worst_kernel,
                               float(np.linalg.norm(approx - exact) / np.linalg.norm(exact)))
        # error of the whole filter-bank output for this signal
        worst = max(worst, math.sqrt(err2 / ref2))
    ok = worst <= 1e-3
    record_criterion(9, ok, f"max relative error per signal {worst:.2e} (tol 1e-3); "
                            f"worst single kernel {worst_kernel:.2e} (informational)")
    assert ok


def test_criterion_10_vertex_frequency_demo(record_criterion, tmp_path):
    t0 = time.perf_counter()
    g = minnesota()
    res = frames.vertex_frequency_demo(g, M=15, R=3, Q=20, seed=0)
    reproduce.write_demo_outputs(res, tmp_path / "a", g.coords, {"seed": 0})
    secs = time.perf_counter() - t0
    res2 = frames.vertex_frequency_demo(minnesota(), M=15, R=3, Q=20, seed=0)
    reproduce.write_demo_outputs(res2, tmp_path / "b", g.coords, {"seed": 0})
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    identical = files and all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
                              for f in files)
    gap = abs(res.B - res.A) / res.B
    # energies recomputed from explicit filtering of the signal
    lam, U = res.eig.eigenvalues, res.eig.eigenvectors
    fhat = U.T @ res.signal
    energy = g.n * ((res.bank.evaluate(lam) * fhat) ** 2).sum(axis=1)
    frac = energy / energy.sum()
    small = int((frac < 0.01).sum())
    ok = gap <= 1e-9 and small >= 3 and secs < 300 and identical
    record_criterion(10, ok, f"|B-A|/B {gap:.1e} (1e-9), {small} filters below 1% (>= 3), "
                             f"{len(files)} CSV files byte-identical={identical}, "
                             f"{secs:.1f}s (< 300s)")
    assert ok
