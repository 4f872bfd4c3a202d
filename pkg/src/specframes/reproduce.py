"""Reproduction suites: figure data, coherence comparison and random-graph laws.

Each check returns a :class:`Check` with the measured value, the threshold
and a verdict. Suites optionally write CSV figure data to a directory.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate, stats

from . import frames, graphs, io, kernels, linalg, warping
from .datasets import minnesota

__all__ = ["Check", "SUITES", "run_suite"]


@dataclass
class Check:
    id: int
    name: str
    passed: bool
    measured: dict
    tolerance: dict
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        chk = fn(*args, **kwargs)
        chk.seconds = time.perf_counter() - t0
        return chk

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _write(out, name, columns, prov=None):
    if out is not None:
        io.write_csv(Path(out) / name, columns, prov)


def _eig(g, kind="combinatorial"):
    return linalg.dense_eigh(graphs.laplacian(g, kind).matrix)


def desk_graphs(seed: int = 1) -> dict[str, graphs.Graph]:
    return {
        "path-64": graphs.build_path(64),
        "sensor-64": graphs.build_sensor(64, seed=seed),
        "comet-64": graphs.build_comet(64, 30),
    }


@_timed
def check_translates(out=None) -> Check:
    """Squares of regular window translates are flat."""
    worst = 0.0
    per = {}
    for name, w in (("hann", kernels.make_hann()), ("blackman", kernels.make_blackman())):
        t = np.linspace(0, 1, 10_000, endpoint=False)
        for R in range(2 * w.K + 1, 13):
            total = sum(w(t - m / R) ** 2 for m in range(-R, R + 1))
            C = w.frame_constant(R)
            dev = float(np.abs(total - C).max() / C)
            per[f"{name}-R{R}"] = dev
            worst = max(worst, dev)
    hann = kernels.make_hann()
    for R, M in ((3, 3), (3, 9), (5, 9)):
        # unit-spaced translates on y, then the same bank scaled to lambda_max = 12
        y = np.linspace(-1, (M + 1 - R) / R + 1, 2000)
        H = np.array([hann(y - m / R + 1) for m in range(1, M + 1)])
        _write(out, f"translates_R{R}_M{M}.csv",
               {"y": y, **{f"h{m}": H[m - 1] for m in range(1, M + 1)},
                "H": (H ** 2).sum(axis=0)})
        bank = kernels.uniform_translates(hann, 12.0, M, R)
        if out is not None:
            io.write_bank_grid(Path(out) / f"uniform_R{R}_M{M}.csv", bank, 2000)
    return Check(1, "translate identity", worst <= 1e-12, {"max_rel_dev": worst, **per},
                 {"max_rel_dev": 1e-12})


@_timed
def check_tightness(out=None, n_signals: int = 20, seed: int = 0) -> Check:
    """Log-warped Hann bank is a tight frame on four graphs."""
    gs = dict(desk_graphs())
    gs["ring-3000"] = graphs.build_ring(3000)
    rng = np.random.default_rng(seed)
    measured = {}
    ok = True
    for name, g in gs.items():
        eig = _eig(g)
        bank = kernels.log_wavelet_bank(kernels.make_hann(), eig.lambda_max, 8, 3)
        A, B = frames.frame_bounds(eig, bank)
        gap = abs(B - A) / B
        worst = 0.0
        for _ in range(n_signals):
            f = rng.standard_normal(g.n)
            c = frames.analyze(eig, bank, f)
            worst = max(worst, abs((c ** 2).sum() - A * (f @ f)) / (A * (f @ f)))
        measured[name] = {"A": A, "B": B, "bound_gap": gap, "parseval_rel_err": worst}
        ok &= gap <= 1e-9 and worst <= 1e-9
        if out is not None and g.n <= 64:
            io.write_bank_grid(Path(out) / f"log_wavelets_{name}.csv", bank, 2000)
            uni = kernels.uniform_translates(kernels.make_hann(), eig.lambda_max, 8, 3)
            io.write_bank_grid(Path(out) / f"uniform_{name}.csv", uni, 2000)
            _write(out, f"spectrum_{name}.csv", {"lambda": eig.eigenvalues})
    return Check(2, "frame tightness", bool(ok), measured,
                 {"bound_gap": 1e-9, "parseval_rel_err": 1e-9})


@_timed
def check_slicing(Q: int = 20, out=None) -> Check:
    """Inertia counts equal dense eigenvalue counts."""
    gs = dict(desk_graphs())
    gs["minnesota"] = minnesota()
    measured = {}
    ok = True
    for name, g in gs.items():
        L = graphs.laplacian(g)
        S = linalg.SparseSym.from_matrix(L.matrix)
        lu = linalg.estimate_lambda_upper(S, "anderson-morley")
        est, rep = warping.sliced_cdf(S, lu, Q, return_report=True)
        lam = _eig(g).eigenvalues
        dense = np.array([int((lam < s).sum()) for s in rep.shifts_used[1:Q]])
        mism = int((dense != rep.counts[1:Q]).sum())
        measured[name] = {"lambda_upper": lu, "mismatches": mism, "nudged": list(rep.nudged),
                          "counts": rep.counts.tolist()}
        ok &= mism == 0
        _write(out, f"sliced_cdf_{name}.csv", {"x": est.x, "value": est.values,
                                                "count": est.counts})
    return Check(3, "inertia slicing", bool(ok), measured, {"mismatches": 0})


@_timed
def check_ring_warp(out=None) -> Check:
    """Monotone-cubic CDF of the ring spectrum versus arccos."""
    lam = _eig(graphs.build_ring(3000)).eigenvalues
    w = warping.interpolate(warping.exact_cdf_points(lam), "monotone-cubic")
    x = np.linspace(0, 4, 2000)
    ref = np.arccos(1 - x / 2) / np.pi
    got = w(x)
    dist = float(np.abs(got - ref).max())
    _write(out, "ring_warp.csv", {"lambda": x, "warp": got, "arccos": ref})
    return Check(4, "ring warp", dist <= 0.01, {"sup_distance": dist}, {"sup_distance": 0.01})


def _quad_cdf_error(cdf, density, lo, zs):
    err = 0.0
    for z in zs:
        val, _ = integrate.quad(lambda s: float(density(np.array([s]))[0]), lo, z,
                                limit=200, epsabs=1e-13, epsrel=1e-12)
        err = max(err, abs(val - float(cdf(np.array([z]))[0])))
    return err


@_timed
def check_mckay(seed: int = 0, out=None) -> Check:
    """McKay law: midpoint, quadrature agreement and KS distance."""
    mid = max(abs(float(warping.McKayCdf(r)(np.array([float(r)]))[0]) - 0.5) for r in (3, 4, 5))
    m3 = warping.McKayCdf(3)
    lo, hi = m3.support
    quad_err = _quad_cdf_error(m3, lambda s: warping.mckay_density(s, 3), lo,
                               np.linspace(lo, hi, 41))
    lam = _eig(graphs.build_random_regular(3000, 3, seed)).eigenvalues
    ks = float(stats.kstest(lam, m3).statistic)
    if out is not None:
        x = np.linspace(0, 6, 1000)
        _write(out, "mckay.csv", {"lambda": x, "density": warping.mckay_density(x, 3),
                                  "cdf": m3(x)})
        _write(out, "rr_spectrum.csv", {"lambda": lam})
    ok = mid <= 1e-12 and quad_err <= 1e-6 and ks <= 0.05
    return Check(5, "McKay law", ok, {"midpoint_err": mid, "quad_err": quad_err, "ks": ks},
                 {"midpoint_err": 1e-12, "quad_err": 1e-6, "ks": 0.05})


@_timed
def check_er_normalized(seed: int = 0, out=None) -> Check:
    """Semicircle law for the normalized Laplacian of G(n, p)."""
    n, p = 3000, 0.05
    law = warping.ErNormalizedCdf(n, p)
    lo = 1 - law.radius
    quad_err = _quad_cdf_error(law, lambda s: warping.er_normalized_density(s, n, p), lo,
                               np.linspace(lo, 1 + law.radius, 41))
    lam = _eig(graphs.build_erdos_renyi(n, p, seed), "normalized").eigenvalues
    ks = float(stats.kstest(lam, law).statistic)
    if out is not None:
        x = np.linspace(0, 2, 1000)
        _write(out, "er_normalized.csv", {"lambda": x, "cdf": law(x)})
    ok = quad_err <= 1e-6 and ks <= 0.05
    return Check(6, "ER normalized law", ok, {"quad_err": quad_err, "ks": ks},
                 {"quad_err": 1e-6, "ks": 0.05})


@_timed
def check_er_combinatorial(seed: int = 0, out=None) -> Check:
    """Free-convolution law for the combinatorial Laplacian of G(n, p)."""
    n, p = 3000, 0.05
    law = warping.er_combinatorial_cdf(n, p)
    g = np.linspace(-6, 6, 4001)
    dens, _ = warping.free_convolution_density(g)
    mass = float(integrate.trapezoid(dens, g))
    F = law.unscaled(g)
    sym = float(np.abs(F + F[::-1] - 1).max())
    w0 = law.mass_below_zero
    lam = _eig(graphs.build_erdos_renyi(n, p, seed)).eigenvalues
    ks = float(stats.kstest(lam, law).statistic)
    if out is not None:
        x = np.linspace(0, law.lambda_upper, 2000)
        _write(out, "er_combinatorial.csv", {"lambda": x, "cdf": law(x)})
    ok = abs(mass - 1) <= 1e-3 and sym <= 1e-4 and 0 < w0 < 5e-3 and ks <= 0.05
    return Check(7, "ER combinatorial law", ok,
                 {"mass": mass, "symmetry_err": sym, "omega_at_0": w0, "ks": ks,
                  "lambda_upper": law.lambda_upper},
                 {"mass": "1 +- 1e-3", "symmetry_err": 1e-4, "omega_at_0": "(0, 5e-3)",
                  "ks": 0.05})


def table1_rows(g: graphs.Graph, M: int = 8, R: int = 3) -> dict[str, dict]:
    eig = _eig(g)
    N = g.n
    ks = [int(round(math.sqrt(N))), N]
    banks = frames.baseline_banks(eig.lambda_max, float(g.degrees.max()), M, R,
                                  eigenvalues=eig.eigenvalues)
    rows = {}
    for label, bank in banks.items():
        rep = frames.frame_report(eig, bank, ks)
        coh = rep.coherence
        rows[label] = {
            "mu_sqrtN": None if coh is None else coh[ks[0]],
            "mu_N": None if coh is None else coh[ks[1]],
            "sigma": rep.sigma_norms,
            "sigma_unit": rep.sigma_unit,
            "zero_atoms": rep.n_zero_atoms,
        }
    return rows


def _is_min(rows, key, label="spectrum-adapted", rtol=1e-9):
    mine = rows[label][key]
    if mine is None:
        return False
    others = [r[key] for k, r in rows.items() if k != label and r[key] is not None]
    return all(mine <= o * (1 + rtol) for o in others)


@_timed
def check_table1(out=None, M: int = 8, R: int = 3) -> Check:
    """Spectrum-adapted wavelets have the smallest coherence and atom-norm spread."""
    results = {"path-256": table1_rows(graphs.build_path(256), M, R),
               "comet-64": table1_rows(graphs.build_comet(64, 30), M, R)}
    ok = True
    verdicts = {}
    for name, rows in results.items():
        for key in ("mu_sqrtN", "mu_N", "sigma"):
            v = _is_min(rows, key)
            verdicts[f"{name}:{key}"] = v
            ok &= v
        if out is not None:
            labels = list(rows)
            _write(out, f"table1_{name}.csv", {
                "bank": np.arange(len(labels)),
                "mu_sqrtN": [np.nan if rows[k]["mu_sqrtN"] is None else rows[k]["mu_sqrtN"]
                             for k in labels],
                "mu_N": [np.nan if rows[k]["mu_N"] is None else rows[k]["mu_N"] for k in labels],
                "sigma_unit": [rows[k]["sigma_unit"] for k in labels],
            }, {"banks": " ".join(labels)})
    comet = results["comet-64"]
    na = any(comet[k]["zero_atoms"] > 0 for k in comet if k != "spectrum-adapted")
    sa_ok = comet["spectrum-adapted"]["zero_atoms"] == 0
    verdicts["comet-64:baseline-has-zero-atom"] = na
    verdicts["comet-64:adapted-has-no-zero-atom"] = sa_ok
    ok &= na and sa_ok
    # unstated bank sizes: repeat the orderings for M = 6..10 (informational)
    sweep = {}
    for m in range(6, 11):
        if m == M:
            continue
        for name, g in (("path-256", graphs.build_path(256)),
                        ("comet-64", graphs.build_comet(64, 30))):
            rows = table1_rows(g, m, R)
            sweep[f"{name}:M={m}"] = {key: _is_min(rows, key)
                                      for key in ("mu_sqrtN", "mu_N", "sigma")}
    sa = results["path-256"]["spectrum-adapted"]
    notes = [f"path-256 adapted mu_1(16)={sa['mu_sqrtN']:.4g} (reference 12.9 +-15%: "
             f"{abs(sa['mu_sqrtN'] / 12.9 - 1) <= 0.15}), mu_1(256)={sa['mu_N']:.4g} "
             f"(reference 34.0 +-15%: {abs(sa['mu_N'] / 34.0 - 1) <= 0.15})"]
    return Check(8, "coherence orderings", bool(ok),
                 {"rows": results, "verdicts": verdicts, "M_sweep": sweep},
                 {"ordering": "spectrum-adapted minimal (relative slack 1e-9)"}, notes=notes)


@_timed
def check_chebyshev(seed: int = 0, order: int = 120, out=None) -> Check:
    """Matrix-free Chebyshev filtering matches exact filtering."""
    g = graphs.build_sensor(64, seed=1)
    L = graphs.laplacian(g)
    eig = linalg.dense_eigh(L.matrix)
    bank = kernels.log_wavelet_bank(kernels.make_hann(), eig.lambda_max, 8, 3)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(10):
        f = rng.standard_normal(g.n)
        exact = frames.analyze(eig, bank, f)
        approx = frames.analyze_chebyshev(L.matrix, bank, f, order, (0.0, eig.lambda_max))
        worst = max(worst, float(np.linalg.norm(approx - exact) / np.linalg.norm(exact)))
    return Check(9, "Chebyshev filtering", worst <= 1e-3, {"max_rel_err": worst},
                 {"max_rel_err": 1e-3})


def write_demo_outputs(res: frames.VertexFrequencyResult, out, coords=None, prov=None):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    prov = dict(prov or {})
    io.write_csv(out / "clusters.csv", {"vertex": np.arange(len(res.labels)),
                                        "cluster": res.labels}, prov)
    io.write_csv(out / "signal.csv", {"vertex": np.arange(len(res.signal)),
                                      "value": res.signal}, prov)
    io.write_csv(out / "cdf_knots.csv", {"x": res.cdf.x, "value": res.cdf.values}, prov)
    io.write_bank_grid(out / "filters.csv", res.bank, 2000, prov)
    io.write_csv(out / "filter_energy.csv",
                 {"filter": np.arange(1, res.bank.M + 1), "energy": res.filter_energy,
                  "fraction": res.energy_fraction}, prov)
    io.write_coefficients(out / "coefficients.csv", res.coefficients, prov)
    for m in range(res.bank.M):
        io.write_plot_data(out / f"coefficients_m{m + 1:02d}.csv", res.coefficients[:, m],
                           coords, dict(prov, filter=m + 1))
    return out


@_timed
def check_demo(out=None, seed: int = 0) -> Check:
    """Vertex-frequency analysis on the road network."""
    g = minnesota()
    res = frames.vertex_frequency_demo(g, seed=seed)
    gap = abs(res.B - res.A) / res.B
    small = int((res.energy_fraction < 0.01).sum())
    ok = gap <= 1e-9 and abs(res.energy_ratio - 1) <= 1e-9 and small >= 3
    if out is not None:
        write_demo_outputs(res, Path(out) / "minnesota", g.coords, {"seed": seed})
    return Check(10, "vertex-frequency demo", bool(ok),
                 {"bound_gap": gap, "energy_ratio": res.energy_ratio,
                  "filters_below_1pct": small,
                  "energy_fraction": res.energy_fraction.tolist()},
                 {"bound_gap": 1e-9, "energy_ratio": "1 +- 1e-9", "filters_below_1pct": ">= 3"})


SUITES = {
    "figures": (check_translates, check_tightness, check_slicing, check_ring_warp,
                check_chebyshev, check_demo),
    "table1": (check_table1,),
    "random-graphs": (check_mckay, check_er_normalized, check_er_combinatorial),
}
SUITES["all"] = SUITES["figures"] + SUITES["table1"] + SUITES["random-graphs"]


def run_suite(suite: str, out=None) -> list[Check]:
    if suite not in SUITES:
        raise KeyError(suite)
    if out is not None:
        Path(out).mkdir(parents=True, exist_ok=True)
    checks = [fn(out=out) for fn in SUITES[suite]]
    return sorted(checks, key=lambda c: c.id)
