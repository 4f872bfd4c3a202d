"""Serialization of filter banks and CSV output with provenance headers.

Banks are stored as JSON. Every kernel and warp is a dataclass, encoded as
``{"type": <class name>, <field>: <value>, ...}`` with arrays wrapped as
``{"array": [...]}``; floats go through ``repr`` so a round trip is exact.
CSV files start with ``#``-prefixed ``key: value`` lines.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from pathlib import Path

import numpy as np

from . import frames, kernels, warping
from .errors import DataError

__all__ = [
    "to_dict",
    "from_dict",
    "bank_to_json",
    "bank_from_json",
    "save_bank",
    "load_bank",
    "config_hash",
    "write_csv",
    "read_csv",
    "write_bank_grid",
    "write_coefficients",
    "write_plot_data",
]

_REGISTRY = {
    cls.__name__: cls
    for cls in (
        kernels.CosineWindow, kernels.CosineBase, kernels.Warped, kernels.ConstantKernel,
        kernels.ScalingComplement, kernels.ChebyshevApprox,
        warping.Identity, warping.Affine, warping.LogWarp, warping.ArccosWarp,
        warping.PiecewiseLinear, warping.MonotoneCubic, warping.McKayCdf,
        warping.ErNormalizedCdf, warping.ErCombinatorialCdf, warping.Composite,
        frames.SgwtBandpass, frames.SgwtLowpass, frames.MeyerScaling, frames.MeyerWavelet,
        frames._ScaledWarp,
    )
}


def to_dict(obj):
    """Encode a kernel, warp or plain value as JSON-compatible data."""
    if isinstance(obj, np.ndarray):
        return {"array": obj.tolist()}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (list, tuple)):
        return [to_dict(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_dict(v) for k, v in obj.items()}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        name = type(obj).__name__
        if name not in _REGISTRY:
            raise DataError(f"cannot serialize {name}")
        out = {"type": name}
        for f in dataclasses.fields(obj):
            out[f.name] = to_dict(getattr(obj, f.name))
        return out
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    raise DataError(f"cannot serialize object of type {type(obj).__name__}")


def from_dict(data):
    if isinstance(data, list):
        return tuple(from_dict(v) for v in data)
    if isinstance(data, dict):
        if set(data) == {"array"}:
            return np.asarray(data["array"], dtype=float)
        if "type" in data:
            try:
                cls = _REGISTRY[data["type"]]
            except KeyError:
                raise DataError(f"unknown object type {data['type']!r}") from None
            kwargs = {k: from_dict(v) for k, v in data.items() if k != "type"}
            return cls(**kwargs)
        return {k: from_dict(v) for k, v in data.items()}
    return data


def bank_to_json(bank: kernels.FilterBank) -> str:
    payload = {
        "format": "specframes-bank",
        "version": 1,
        "lambda_upper": bank.lambda_upper,
        "frame_constant": bank.frame_constant,
        "meta": to_dict(bank.meta),
        "kernels": [to_dict(g) for g in bank.kernels],
    }
    return json.dumps(payload, indent=1, sort_keys=True)


def _meta_from(data):
    # meta holds plain JSON values; keep lists as lists
    return json.loads(json.dumps(data))


def bank_from_json(text: str) -> kernels.FilterBank:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"bank file is not valid JSON: {exc}") from None
    if data.get("format") != "specframes-bank":
        raise DataError("not a filter bank file")
    ks = [from_dict(k) for k in data["kernels"]]
    return kernels.FilterBank(ks, float(data["lambda_upper"]), float(data["frame_constant"]),
                              _meta_from(data.get("meta", {})))


def save_bank(bank: kernels.FilterBank, path):
    Path(path).write_text(bank_to_json(bank) + "\n")


def load_bank(path) -> kernels.FilterBank:
    return bank_from_json(Path(path).read_text())


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path, columns: dict, provenance: dict | None = None):
    """Write equal-length columns, preceded by ``# key: value`` header lines."""
    path = Path(path)
    names = list(columns)
    cols = [np.asarray(columns[k]) for k in names]
    n = {len(c) for c in cols}
    if len(n) > 1:
        raise DataError("CSV columns must have equal length")
    with open(path, "w", newline="") as fh:
        for k, v in (provenance or {}).items():
            fh.write(f"# {k}: {v}\n")
        fh.write(",".join(names) + "\n")
        for row in zip(*cols):
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def read_csv(path) -> tuple[dict, dict]:
    """Return ``(provenance, columns)`` from a file written by :func:`write_csv`."""
    prov, header, rows = {}, None, []
    with open(path) as fh:
        for line in fh:
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                if ":" in s:
                    k, v = s[1:].split(":", 1)
                    prov[k.strip()] = v.strip()
                continue
            if header is None:
                header = s.split(",")
                continue
            rows.append([float(x) for x in s.split(",")])
    if header is None:
        raise DataError(f"{path}: no header row")
    arr = np.array(rows, dtype=float).reshape(-1, len(header))
    return prov, {h: arr[:, j] for j, h in enumerate(header)}


def write_bank_grid(path, bank: kernels.FilterBank, n_points: int = 1000,
                    provenance: dict | None = None):
    """``lambda, g_1, ..., g_M, G`` on a uniform grid of ``[0, lambda_upper]``."""
    lam = np.linspace(0, bank.lambda_upper, n_points)
    vals = bank.evaluate(lam)
    cols = {"lambda": lam}
    for m, v in enumerate(vals, 1):
        cols[f"g{m}"] = v
    cols["G"] = (vals ** 2).sum(axis=0)
    return write_csv(path, cols, provenance)


def write_coefficients(path, coefficients, provenance: dict | None = None):
    """Long format ``vertex, filter, value`` (filters numbered from 1)."""
    c = np.asarray(coefficients, dtype=float)
    n, m = c.shape
    vertex = np.tile(np.arange(n), m)
    filt = np.repeat(np.arange(1, m + 1), n)
    return write_csv(path, {"vertex": vertex, "filter": filt, "value": c.T.ravel()}, provenance)


def write_plot_data(path, values, coords=None, provenance: dict | None = None):
    """``vertex[, x, y], magnitude`` for one vertex map."""
    v = np.abs(np.asarray(values, dtype=float))
    cols = {"vertex": np.arange(len(v))}
    if coords is not None:
        cols["x"] = coords[:, 0]
        cols["y"] = coords[:, 1]
    cols["magnitude"] = v
    return write_csv(path, cols, provenance)
