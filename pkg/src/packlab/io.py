"""Text, JSON and Sloane-style serialization for packings and certificates."""
from __future__ import annotations

import json

import numpy as np

from .errors import PacklabError, UnknownFormat
from .frames import Packing, build_packing


def fmt(x: float) -> str:
    return "%.17g" % x


def packing_to_text(p: Packing) -> str:
    """``d n field`` header, then one line per vector (complex: re/im interleaved)."""
    lines = [f"{p.d} {p.n} {p.field}"]
    for col in p.columns.T:
        if p.is_complex:
            vals = [v for z in col for v in (z.real, z.imag)]
        else:
            vals = col
        lines.append(" ".join(fmt(float(v)) for v in vals))
    return "\n".join(lines) + "\n"


def packing_from_text(text: str) -> Packing:
    rows = [r.split() for r in text.splitlines() if r.strip() and not r.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 3:
        raise PacklabError("packing text needs a 'd n real|complex' header")
    d, n, field = int(rows[0][0]), int(rows[0][1]), rows[0][2]
    if field not in ("real", "complex"):
        raise PacklabError(f"unknown field {field!r}")
    body = rows[1:]
    if len(body) != n:
        raise PacklabError(f"header promises {n} vectors, found {len(body)}")
    width = d if field == "real" else 2 * d
    data = np.array([[float(x) for x in r] for r in body])
    if data.shape != (n, width):
        raise PacklabError(f"each vector line needs {width} values")
    cols = data.T if field == "real" else (data[:, 0::2] + 1j * data[:, 1::2]).T
    return build_packing(cols, field)


def _jsonable(meta: dict) -> dict:
    out = {}
    for k, v in meta.items():
        if isinstance(v, (str, int, float, bool)) or v is None:
            out[str(k)] = v
        elif isinstance(v, (list, tuple)):
            out[str(k)] = [x if isinstance(x, (str, int, float, bool)) else str(x) for x in v]
        else:
            out[str(k)] = str(v)
    return out


def packing_to_json(p: Packing) -> str:
    if p.is_complex:
        cols = [[[float(z.real), float(z.imag)] for z in col] for col in p.columns.T]
    else:
        cols = [[float(x) for x in col] for col in p.columns.T]
    doc = {"d": p.d, "n": p.n, "field": p.field, "columns": cols, "meta": _jsonable(p.meta)}
    return json.dumps(doc) + "\n"


def packing_from_json(text: str) -> Packing:
    doc = json.loads(text)
    field = doc.get("field", "real")
    cols = np.array(doc["columns"], dtype=float)
    if field == "complex":
        cols = cols[..., 0] + 1j * cols[..., 1]
    p = build_packing(cols.T, field, doc.get("meta") or {})
    if (p.d, p.n) != (doc["d"], doc["n"]):
        raise PacklabError("declared d, n do not match the columns")
    return p


def packing_from_sloane(text: str, d: int, n: int) -> Packing:
    """One coordinate per line, ``d*n`` lines, vector after vector."""
    vals = [float(t) for t in text.split()]
    if len(vals) != d * n:
        raise PacklabError(f"expected {d * n} coordinates, found {len(vals)}")
    cols = np.array(vals).reshape(n, d).T
    return build_packing(cols / np.linalg.norm(cols, axis=0), "real")


def load_packing(path: str, sloane: tuple | None = None) -> Packing:
    with open(path) as fh:
        text = fh.read()
    if sloane:
        return packing_from_sloane(text, *sloane)
    if path.endswith(".json") or text.lstrip().startswith("{"):
        return packing_from_json(text)
    return packing_from_text(text)


def dump_packing(p: Packing, path: str, format: str | None = None) -> None:
    format = format or ("json" if path.endswith(".json") else "text")
    if format == "json":
        text = packing_to_json(p)
    elif format == "text":
        text = packing_to_text(p)
    else:
        raise UnknownFormat(f"unknown packing format {format!r}")
    with open(path, "w") as fh:
        fh.write(text)


def certificate_to_json(y, meta: dict | None = None) -> str:
    y = np.asarray(y, dtype=float)
    return json.dumps({"n": int(y.shape[0]), "Y": [float(v) for v in y.ravel()],
                       "meta": _jsonable(meta or {})}) + "\n"


def certificate_from_json(text: str) -> np.ndarray:
    doc = json.loads(text)
    n = int(doc["n"])
    y = np.array(doc["Y"], dtype=float)
    if y.size != n * n:
        raise PacklabError(f"certificate needs {n * n} entries, found {y.size}")
    return y.reshape(n, n)
