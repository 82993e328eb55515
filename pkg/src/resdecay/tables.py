"""Plot-ready CSV tables with JSON metadata sidecars."""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from . import __version__

FLOAT_FORMAT = "{:.14e}"


def _cell(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FLOAT_FORMAT.format(float(x))


def format_rows(columns: dict) -> str:
    """CSV text from equal-length columns; header row first."""
    names = list(columns)
    cols = [np.asarray(columns[n]) for n in names]
    lengths = {len(c) for c in cols}
    if len(lengths) > 1:
        raise ValueError("columns differ in length")
    lines = [",".join(names)]
    for row in zip(*cols):
        lines.append(",".join(_cell(x) for x in row))
    return "\n".join(lines) + "\n"


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_table(path, columns: dict, meta: dict) -> Path:
    """Write ``path`` (CSV) and ``path.meta.json`` next to it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(path, format_rows(columns))
    sidecar = dict(meta, engine_version=__version__, columns=list(columns),
                   rows=len(next(iter(columns.values()))) if columns else 0)
    write_json(path.with_name(path.name + ".meta.json"), sidecar)
    return path


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"not serializable: {type(x).__name__}")


def pole_columns(poles) -> dict:
    return {
        "n": poles.index,
        "re_kappa": poles.kappa.real,
        "im_kappa": poles.kappa.imag,
        "resonance_energy": poles.resonance_energy,
        "width": poles.width,
        "residual": poles.residuals(),
    }


def coefficient_columns(coeffs) -> dict:
    return {
        "n": coeffs.index,
        "re_c": coeffs.c.real,
        "im_c": coeffs.c.imag,
        "re_cbar": coeffs.cbar.real,
        "im_cbar": coeffs.cbar.imag,
        "strength": coeffs.strength,
        "cumulative": coeffs.cumulative_strength,
    }


def curve_columns(times, S, P, A) -> dict:
    A = np.asarray(A)
    return {"t": times, "S": S, "P": P, "re_A": A.real, "im_A": A.imag}


def frame_columns(times, r, psi) -> dict:
    """psi has shape (len(times), len(r)); rows are time-major."""
    psi = np.asarray(psi)
    tt = np.repeat(np.asarray(times, float), len(r))
    rr = np.tile(np.asarray(r, float), len(times))
    flat = psi.reshape(-1)
    return {"t": tt, "r": rr, "re_psi": flat.real, "im_psi": flat.imag,
            "density": np.abs(flat) ** 2}


def frame_columns_two(times, r, psi) -> dict:
    """psi has shape (len(times), len(r), len(r)) on the product grid."""
    psi = np.asarray(psi)
    n = len(r)
    tt = np.repeat(np.asarray(times, float), n * n)
    r1 = np.tile(np.repeat(np.asarray(r, float), n), len(times))
    r2 = np.tile(np.asarray(r, float), n * len(times))
    flat = psi.reshape(-1)
    return {"t": tt, "r1": r1, "r2": r2, "re_psi": flat.real, "im_psi": flat.imag,
            "density": np.abs(flat) ** 2}
