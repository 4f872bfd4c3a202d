"""Command-line front end.

Subcommands: ``design``, ``cdf``, ``analyze`` and ``reproduce``. Options may
also come from a JSON file given with ``--config``; flags on the command
line take precedence. Exit status: 0 success, 2 invalid input, 3 numerical
or construction failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import frames, graphs, io, kernels, linalg, warping
from .datasets import minnesota
from .errors import ConstructionError, DataError, NumericalError, ParameterError

log = logging.getLogger("specframes")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


# -- argument helpers -------------------------------------------------------


def _kv(text: str) -> dict:
    """Parse ``a=1,b=2`` (values become float or int when possible)."""
    out = {}
    for part in filter(None, text.split(",")):
        if "=" not in part:
            raise ParameterError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        try:
            out[k.strip()] = int(v)
        except ValueError:
            try:
                out[k.strip()] = float(v)
            except ValueError:
                out[k.strip()] = v.strip()
    return out


def parse_graph(spec: str, seed: int = 0) -> graphs.Graph:
    """``path:N``, ``ring:N``, ``comet:N[:deg]``, ``sensor:N``, ``regular:N:r``,
    ``er:N:p``, ``minnesota`` or a file path."""
    head, _, rest = spec.partition(":")
    args = rest.split(":") if rest else []
    try:
        if head == "path":
            return graphs.build_path(int(args[0]))
        if head == "ring":
            return graphs.build_ring(int(args[0]))
        if head == "comet":
            n = int(args[0])
            return graphs.build_comet(n, int(args[1]) if len(args) > 1 else min(30, n - 1))
        if head == "sensor":
            n = int(args[0])
            kw = _kv(args[1]) if len(args) > 1 else {}
            return graphs.build_sensor(n, seed=seed, **kw)
        if head == "regular":
            return graphs.build_random_regular(int(args[0]), int(args[1]), seed)
        if head == "er":
            return graphs.build_erdos_renyi(int(args[0]), float(args[1]), seed)
        if head == "minnesota" and not args:
            return minnesota()
    except (IndexError, ValueError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"bad graph spec {spec!r}: {exc}") from None
    path = Path(spec)
    if not path.exists():
        raise FileNotFoundError(f"graph file not found: {path}")
    return graphs.load_graph(path)


def _window(name: str) -> kernels.CosineWindow:
    if name == "hann":
        return kernels.make_hann()
    if name == "blackman":
        return kernels.make_blackman()
    try:
        return kernels.CosineWindow(tuple(float(x) for x in name.split(",")))
    except ValueError:
        raise ParameterError(f"unknown window {name!r}") from None


def _provenance(args, extra=None) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    prov = {"generator": "specframes", "config_hash": io.config_hash(cfg), "seed": args.seed}
    prov.update(extra or {})
    return prov


def _out(args) -> Path:
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


class _Context:
    """Lazily built graph, Laplacian and spectrum shared by one command."""

    def __init__(self, args):
        self.args = args
        self._g = self._L = self._eig = None

    @property
    def graph(self):
        if self._g is None:
            if not self.args.graph:
                raise ParameterError("this command needs --graph")
            self._g = parse_graph(self.args.graph, self.args.seed)
        return self._g

    @property
    def laplacian(self):
        if self._L is None:
            self._L = graphs.laplacian(self.graph, self.args.laplacian)
        return self._L

    @property
    def eig(self):
        if self._eig is None:
            self._eig = linalg.dense_eigh(self.laplacian.matrix)
        return self._eig

    def lambda_upper(self):
        if self.args.lambda_upper is not None:
            return float(self.args.lambda_upper)
        if self.laplacian.n <= linalg.DENSE_EIGH_CAP:
            return float(self.eig.lambda_max)
        S = linalg.SparseSym.from_matrix(self.laplacian.matrix)
        return linalg.estimate_lambda_upper(S, "anderson-morley")

    def cdf(self, method, Q, indices=None):
        lu = self.lambda_upper()
        if method == "exact":
            return warping.exact_cdf_points(self.eig.eigenvalues)
        if method == "subsampled":
            if not indices:
                raise ParameterError("--method subsampled needs --indices")
            return warping.exact_cdf_points(self.eig.eigenvalues, indices)
        if method == "sliced":
            return warping.sliced_cdf(self.laplacian.matrix, lu, Q)
        raise ParameterError(f"unknown CDF method {method!r}")


def _scaled(w, factor):
    return frames._ScaledWarp(w, factor)


def build_bank(ctx: _Context) -> kernels.FilterBank:
    """Bank described by ``--window/--M/--R/--warp``."""
    a = ctx.args
    window = _window(a.window)
    M = 8 if a.M is None else a.M
    kind, _, params = a.warp.partition(":")
    kw = _kv(params)
    if kind == "none":
        lu = ctx.lambda_upper()
        return kernels.uniform_translates(window, lu, M, a.R)
    if kind == "log":
        return kernels.log_wavelet_bank(window, ctx.lambda_upper(), M, a.R, a.eps)
    if kind in ("exact", "sliced", "subsampled"):
        est = ctx.cdf(kind, a.Q, _indices(a.indices))
        w = warping.interpolate(est, a.interp)
        lu = ctx.lambda_upper()
        bank = kernels.warp_bank(kernels.uniform_translates(window, 1.0, M, a.R), w, lu)
        bank.meta["cdf"] = est.provenance
        return bank
    if kind == "adapted":
        est = ctx.cdf(kw.get("cdf", "exact"), a.Q, _indices(a.indices))
        lu = ctx.lambda_upper()
        w0 = _scaled(warping.interpolate(est, a.interp), lu)
        return kernels.spectrum_adapted_wavelet_bank(window, w0, lu, M, a.R, a.eps)
    if kind == "mckay":
        r = int(kw.get("r", 3))
        lu = float(a.lambda_upper) if a.lambda_upper is not None else 2.0 * r
        return kernels.warp_bank(kernels.uniform_translates(window, 1.0, M, a.R),
                                 warping.McKayCdf(r), lu)
    if kind in ("er", "er-normalized"):
        n, p = int(kw["n"]), float(kw["p"])
        if kind == "er":
            law = warping.er_combinatorial_cdf(n, p, lambda_upper=a.lambda_upper)
            lu = law.lambda_upper
        else:
            law = warping.ErNormalizedCdf(n, p)
            lu = float(a.lambda_upper) if a.lambda_upper is not None else 2.0
        return kernels.warp_bank(kernels.uniform_translates(window, 1.0, M, a.R), law, lu)
    if kind == "arccos":
        lu = ctx.lambda_upper()
        d_max = float(kw.get("d_max", ctx.graph.degrees.max()))
        bank = kernels.uniform_translates(window, lu, M, a.R)
        return kernels.warp_bank(bank, warping.ArccosWarp(lu, d_max), lu)
    raise ParameterError(f"unknown warp {a.warp!r}")


def _indices(text):
    if not text:
        return None
    try:
        return [int(x) for x in str(text).split(",")]
    except ValueError:
        raise ParameterError(f"bad index list {text!r}") from None


# -- subcommands ------------------------------------------------------------


def cmd_design(args) -> int:
    ctx = _Context(args)
    bank = build_bank(ctx)
    out = _out(args)
    prov = _provenance(args, {"frame_constant": bank.frame_constant})
    io.save_bank(bank, out / "bank.json")
    lam = np.linspace(0, bank.lambda_upper, args.points)
    vals = bank.evaluate(lam)
    for m, v in enumerate(vals, 1):
        io.write_csv(out / f"kernel_{m:02d}.csv", {"lambda": lam, "g": v}, dict(prov, kernel=m))
    G = (vals ** 2).sum(axis=0)
    io.write_csv(out / "G.csv", {"lambda": lam, "G": G}, prov)
    dev = float(np.abs(G - bank.frame_constant).max() / bank.frame_constant)
    tight = dev <= args.tol
    print(f"frame constant: {bank.frame_constant!r}")
    print(f"max |G - C| / C on [0, {bank.lambda_upper:g}]: {dev:.3e}")
    print(f"tight: {'yes' if tight else 'no'}")
    if args.graph:
        A, B = frames.frame_bounds(ctx.eig, bank)
        print(f"frame bounds on the spectrum: A={A!r} B={B!r}")
    return EXIT_OK


def cmd_cdf(args) -> int:
    if args.Q < 2:
        raise ParameterError("Q must be >= 2")
    ctx = _Context(args)
    est = ctx.cdf(args.method, args.Q, _indices(args.indices))
    out = _out(args)
    prov = _provenance(args)
    est.to_csv(out / "cdf.csv", {k: v for k, v in prov.items()})
    w = warping.interpolate(est, args.interp)
    x = np.linspace(0, est.lambda_upper, args.points)
    io.write_csv(out / "warp.csv", {"lambda": x, "warp": w(x)}, prov)
    print(f"{len(est)} knots ({est.provenance}), lambda_upper={est.lambda_upper!r}")
    return EXIT_OK


def _read_signal(path, n) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"signal file not found: {path}")
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=1)
    except ValueError:
        try:
            _, cols = io.read_csv(path)
        except (ValueError, DataError) as exc:
            raise DataError(f"{path}: {exc}") from None
        data = cols.get("value", next(iter(cols.values())))
    if data.ndim == 2:
        data = data[:, -1]
    if len(data) != n:
        raise DataError(f"{path}: {len(data)} values for a graph with {n} vertices")
    return data


def cmd_analyze(args) -> int:
    out = _out(args)
    prov = _provenance(args)
    if args.demo:
        g = parse_graph(args.graph or "minnesota", args.seed)
        res = frames.vertex_frequency_demo(g, 15 if args.M is None else args.M, args.R, args.Q, seed=args.seed,
                                           window=_window(args.window),
                                           lambda_upper=args.lambda_upper)
        from .reproduce import write_demo_outputs

        write_demo_outputs(res, out, g.coords, prov)
        io.save_bank(res.bank, out / "bank.json")
        ratio, A, B = res.energy_ratio, res.A, res.B
    else:
        ctx = _Context(args)
        if args.bank:
            bpath = Path(args.bank)
            if not bpath.exists():
                raise FileNotFoundError(f"bank file not found: {bpath}")
            bank = io.load_bank(bpath)
        else:
            bank = build_bank(ctx)
        if not args.signal:
            raise ParameterError("analyze needs --signal FILE or --demo")
        f = _read_signal(args.signal, ctx.graph.n)
        c = frames.analyze(ctx.eig, bank, f)
        A, B = frames.frame_bounds(ctx.eig, bank)
        ratio = float((c ** 2).sum() / (A * (f @ f))) if A > 0 else float("nan")
        io.write_coefficients(out / "coefficients.csv", c, prov)
        coords = ctx.graph.coords
        for m in range(bank.M):
            io.write_plot_data(out / f"coefficients_m{m + 1:02d}.csv", c[:, m], coords,
                               dict(prov, filter=m + 1))
    report = {"A": A, "B": B, "energy_ratio": ratio}
    (out / "report.json").write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    print(f"A={A!r} B={B!r} sum c^2 / (A ||f||^2) = {ratio!r}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    from .reproduce import SUITES, run_suite

    if args.suite not in SUITES:
        raise _UsageError(f"unknown suite {args.suite!r}; choose from {sorted(SUITES)}")
    out = _out(args)
    checks = run_suite(args.suite, out)
    report = {"suite": args.suite, "passed": all(c.passed for c in checks),
              "checks": [c.as_dict() for c in checks]}
    text = json.dumps(report, indent=1, sort_keys=True, default=float)
    (out / "report.json").write_text(text + "\n")
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.id:2d} {c.name} ({c.seconds:.1f} s)")
        for n in c.notes:
            print(f"     {n}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def _common(p):
    p.add_argument("--graph", help="path:N, ring:N, comet:N[:deg], sensor:N, regular:N:r, "
                                   "er:N:p, minnesota, or an edge-list / .mtx file")
    p.add_argument("--laplacian", choices=("combinatorial", "normalized"),
                   default="combinatorial")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")
    p.add_argument("--lambda-upper", type=float, default=None)
    p.add_argument("--points", type=int, default=1000, help="grid size for CSV output")


def _bank_opts(p):
    p.add_argument("--window", default="hann", help="hann, blackman or comma-separated a_k")
    p.add_argument("--M", type=int, default=None, help="number of filters (8; 15 with --demo)")
    p.add_argument("--R", type=int, default=3)
    p.add_argument("--warp", default="none",
                   help="none, log, exact, sliced, subsampled, adapted[:cdf=sliced], "
                        "mckay:r=3, er:n=..,p=.., er-normalized:n=..,p=.., arccos[:d_max=..]")
    p.add_argument("--Q", type=int, default=20)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--interp", choices=("linear", "monotone-cubic"), default="monotone-cubic")
    p.add_argument("--indices", default=None, help="eigenvalue indices for a subsampled CDF")
    p.add_argument("--tol", type=float, default=1e-9)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="specframes", description=__doc__.split("\n")[0])
    parser.add_argument("--config", help="JSON file with option values")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("design", help="build a filter bank and write its kernels")
    _common(p)
    _bank_opts(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("cdf", help="estimate the spectral CDF")
    _common(p)
    p.add_argument("--method", choices=("exact", "subsampled", "sliced"), default="sliced")
    p.add_argument("--Q", type=int, default=20)
    p.add_argument("--indices", default=None)
    p.add_argument("--interp", choices=("linear", "monotone-cubic"), default="monotone-cubic")
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("analyze", help="analysis coefficients of a signal")
    _common(p)
    _bank_opts(p)
    p.add_argument("--signal", help="file with one value per vertex")
    p.add_argument("--bank", help="bank.json written by 'design'")
    p.add_argument("--demo", action="store_true",
                   help="cluster the graph and synthesize the banded test signal")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("reproduce", help="run a reproduction suite")
    p.add_argument("suite", help="figures, table1, random-graphs or all")
    p.add_argument("--out", default="reproduce-out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_reproduce)
    return parser


def _apply_config(parser, argv):
    """Reparse with defaults taken from the JSON config file, if any."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    path = Path(args.config)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    try:
        cfg = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise DataError(f"{path}: expected a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions} - {"help", "func"}
    unknown = sorted(set(k.replace("-", "_") for k in cfg) - known)
    if unknown:
        raise ParameterError(f"{path}: unknown config keys {unknown}")
    sub.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        return args.func(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION
    except (ParameterError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, ConstructionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
