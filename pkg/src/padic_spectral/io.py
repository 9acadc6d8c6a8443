"""File formats: functions, spectra, basis dumps, kernel specs, CSV and SVG.

Floats are always written with 17 significant digits and files are written
atomically, so identical inputs give identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .bases import BasisSet
from .fourier import FrequencyGrid, Spectrum
from .functions import GridFunction
from .operators import KernelSpec
from .padic import enumerate_cosets
from .scalars import QuadArray, QuadScalar

FLOAT_FORMAT = ".17g"


class FormatError(ValueError):
    """A file parsed but does not follow the expected schema."""


def fmt_float(x: float) -> str:
    return format(float(x), FLOAT_FORMAT)


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, tuple, Mapping)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with floats fixed to 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def atomic_write(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc


# -- scalars ------------------------------------------------------------------------

def encode_scalar(x):
    if isinstance(x, QuadScalar):
        return list(x.to_pair())
    if isinstance(x, Fraction):
        return [str(x), "0"]
    if isinstance(x, (int, np.integer)):
        return [str(int(x)), "0"]
    z = complex(x)
    return [z.real, z.imag]


def encode_number(x):
    """Eigenvalue-style scalar: rational string when exact, float otherwise."""
    if x is None:
        return None
    if isinstance(x, (Fraction, int)):
        return str(Fraction(x))
    if isinstance(x, QuadScalar):
        return str(x)
    return float(x)


def decode_number(x):
    if x is None:
        return None
    if isinstance(x, str):
        return Fraction(x)
    return x


# -- functions -----------------------------------------------------------------------

def function_document(f: GridFunction, role: str = "function") -> dict:
    g = f.grid
    return {
        "role": role,
        "p": g.p,
        "r": g.r,
        "l": g.l,
        "backend": f.backend.tag,
        "values": [encode_scalar(v) for v in f.values],
    }


def function_from_document(doc: Mapping) -> GridFunction:
    try:
        p, r, l = int(doc["p"]), int(doc["r"]), int(doc["l"])
        backend = doc["backend"]
        values = doc["values"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"function document is missing a field: {exc}") from exc
    grid = enumerate_cosets(p, r, l)
    if len(values) != grid.size:
        raise FormatError(f"expected {grid.size} values, got {len(values)}")
    if backend in ("exact", "exact-quad"):
        scalars = [QuadScalar.from_pair(v, p) for v in values]
        return GridFunction(grid, QuadArray.from_scalars(scalars, p))
    if backend in ("float", "complex-float"):
        return GridFunction(grid, np.array([complex(float(a), float(b)) for a, b in values]))
    raise FormatError(f"unknown backend {backend!r}")


def write_function(path, f: GridFunction) -> None:
    atomic_write(path, dumps(function_document(f)))


def read_function(path) -> GridFunction:
    doc = _load(path)
    if doc.get("role", "function") != "function":
        raise FormatError(f"{path}: not a function file (role={doc.get('role')!r})")
    return function_from_document(doc)


# -- spectra --------------------------------------------------------------------------

def spectrum_document(s: Spectrum) -> dict:
    fq = s.freq
    return {
        "role": "frequencies",
        "p": fq.p,
        "r": fq.r,
        "l": fq.l,
        "backend": "float",
        "frequencies": [str(k) for k in fq.frequencies],
        "values": [encode_scalar(v) for v in s.values],
    }


def write_spectrum(path, s: Spectrum) -> None:
    atomic_write(path, dumps(spectrum_document(s)))


def read_spectrum(path) -> Spectrum:
    doc = _load(path)
    if doc.get("role") != "frequencies":
        raise FormatError(f"{path}: not a spectrum file")
    fq = FrequencyGrid(int(doc["p"]), int(doc["r"]), int(doc["l"]))
    vals = np.array([complex(float(a), float(b)) for a, b in doc["values"]])
    return Spectrum(fq, vals)


# -- basis dumps ----------------------------------------------------------------------

def basis_records(basis: BasisSet) -> list[dict]:
    out = []
    for el, fn in zip(basis.elements, basis.functions()):
        out.append({
            "kind": el.kind,
            "gamma": el.gamma,
            "n": str(el.n),
            "label": el.label,
            "eigenvalue": encode_number(el.eigenvalue),
            "values": [encode_scalar(v) for v in fn.values],
        })
    return out


def basis_document(basis: BasisSet) -> dict:
    g = basis.grid
    return {"role": "basis", "p": g.p, "r": g.r, "l": g.l, "kind": basis.kind,
            "backend": "exact" if basis.exact else "float", "elements": basis_records(basis)}


# -- kernel specs ---------------------------------------------------------------------

def kernel_spec_document(spec: KernelSpec) -> dict:
    scales = []
    for g in range(spec.gamma_min, spec.gamma_max + 1):
        overrides = [{"n": str(n), "value": encode_number(v)}
                     for (gg, n), v in sorted(spec.overrides.items()) if gg == g]
        scales.append({"gamma": g, "default": encode_number(spec.defaults.get(g, 0)),
                       "overrides": overrides})
    return {"p": spec.p, "gamma_min": spec.gamma_min, "gamma_max": spec.gamma_max, "scales": scales}


def kernel_spec_from_document(doc: Mapping) -> KernelSpec:
    try:
        p = int(doc["p"])
        gmin, gmax = int(doc["gamma_min"]), int(doc["gamma_max"])
        defaults, overrides = {}, {}
        for entry in doc.get("scales", []):
            g = int(entry["gamma"])
            defaults[g] = decode_number(entry.get("default", 0))
            for ov in entry.get("overrides", []):
                overrides[(g, Fraction(ov["n"]))] = decode_number(ov["value"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed kernel spec: {exc}") from exc
    return KernelSpec(p, gmin, gmax, defaults, overrides)


def read_kernel_spec(path) -> KernelSpec:
    return kernel_spec_from_document(_load(path))


def write_kernel_spec(path, spec: KernelSpec) -> None:
    atomic_write(path, dumps(kernel_spec_document(spec)))


# -- CSV and SVG ----------------------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def timeseries_csv(times: Sequence[float], columns: np.ndarray, names: Sequence[str]) -> str:
    columns = np.asarray(columns, dtype=float)
    if columns.ndim == 1:
        columns = columns[:, None]
    rows = ([float(t)] + [float(v) for v in row] for t, row in zip(times, columns))
    return csv_text(["t", *names], rows)


def read_timeseries_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    return header, data


def svg_plot(series: Mapping[str, tuple[Sequence[float], Sequence[float]]],
             title: str = "", width: int = 640, height: int = 400) -> str:
    """Minimal line chart; one polyline per named series."""
    margin = 50
    xs = [float(x) for t, _ in series.values() for x in t]
    ys = [float(y) for _, v in series.values() for y in v]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys + [0.0]), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def px(x):
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin)

    def py(y):
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{margin / 2:.1f}" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{width - margin}" y="{height - margin / 3:.1f}" text-anchor="end" font-size="12">t = {x1:.6g}</text>',
        f'<text x="{margin / 8:.1f}" y="{margin:.1f}" font-size="12">{y1:.6g}</text>',
        f'<text x="{margin / 8:.1f}" y="{height - margin:.1f}" font-size="12">{y0:.6g}</text>',
    ]
    for i, (name, (t, v)) in enumerate(series.items()):
        color = colors[i % len(colors)]
        pts = " ".join(f"{px(float(a)):.3f},{py(float(b)):.3f}" for a, b in zip(t, v))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        parts.append(f'<text x="{width - margin - 4}" y="{margin + 16 * (i + 1)}" text-anchor="end" '
                     f'font-size="12" fill="{color}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
