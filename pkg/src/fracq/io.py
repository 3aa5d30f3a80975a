"""Series files (CSV and the FRACQ001 binary container) and atomic writes.

Binary layout, all little-endian::

    offset  size  field
    0       8     magic b"FRACQ001"
    8       4     kind code (uint32, see KIND_CODES)
    12      8     Hurst exponent (float64, NaN when absent)
    20      8     sample count (uint64)
    28      8*n   samples (float64)
"""

from __future__ import annotations

import json
import math
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from fracq.errors import FormatError

MAGIC = b"FRACQ001"
HEADER = struct.Struct("<8sIdQ")
KIND_CODES = {"white": 0, "fgn": 1, "fbm": 2, "quantized": 3, "error": 4, "other": 5}
KIND_NAMES = {v: k for k, v in KIND_CODES.items()}


def atomic_write(path, data: bytes | str) -> Path:
    """Write ``data`` to ``path`` through a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def format_float(x: float) -> str:
    return repr(float(x))


def columns_to_csv(header: list[str], *columns) -> str:
    """Comma-separated text with a header row; floats use round-trip repr."""
    cells = []
    for col in columns:
        col = np.asarray(col)
        if np.issubdtype(col.dtype, np.integer):
            cells.append([str(v) for v in col.tolist()])
        else:
            cells.append([format_float(v) for v in col.tolist()])
    rows = [",".join(header)] + [",".join(row) for row in zip(*cells)]
    return "\n".join(rows) + "\n"


def series_to_csv(values) -> str:
    values = np.asarray(values, dtype=np.float64)
    return columns_to_csv(["index", "value"], np.arange(values.size), values)


def series_to_binary(values, kind: str = "other", H: float | None = None) -> bytes:
    values = np.ascontiguousarray(values, dtype="<f8")
    head = HEADER.pack(MAGIC, KIND_CODES[kind], math.nan if H is None else float(H),
                       values.size)
    return head + values.tobytes()


def write_series(path, values, fmt: str = "csv", kind: str = "other",
                 H: float | None = None) -> Path:
    if fmt == "csv":
        return atomic_write(path, series_to_csv(values))
    if fmt == "binary":
        return atomic_write(path, series_to_binary(values, kind, H))
    raise FormatError(f"unknown series format {fmt!r}")


def write_json(path, obj) -> Path:
    return atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _parse_binary(raw: bytes, name: str) -> tuple[np.ndarray, dict]:
    if len(raw) < HEADER.size:
        raise FormatError(f"{name}: truncated header at offset {len(raw)}")
    _, code, H, n = HEADER.unpack_from(raw)
    if code not in KIND_NAMES:
        raise FormatError(f"{name}: unknown kind code {code} at offset 8")
    expected = HEADER.size + 8 * n
    if len(raw) != expected:
        raise FormatError(f"{name}: expected {expected} bytes for {n} samples, "
                          f"found {len(raw)} (offset {min(len(raw), expected)})")
    values = np.frombuffer(raw, dtype="<f8", offset=HEADER.size, count=n).astype(np.float64)
    meta = {"kind": KIND_NAMES[code], "H": None if math.isnan(H) else H}
    return values, meta


def _parse_csv(text: str, name: str) -> np.ndarray:
    lines = text.splitlines()
    if not lines:
        raise FormatError(f"{name}: empty file (line 1)")
    header = [h.strip() for h in lines[0].split(",")]
    if len(header) < 2:
        raise FormatError(f"{name}: line 1: expected a header with two columns")
    values = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise FormatError(f"{name}: line {lineno}: expected {len(header)} fields, "
                              f"got {len(parts)}")
        try:
            index = int(parts[0])
            value = float(parts[1])
        except ValueError:
            raise FormatError(f"{name}: line {lineno}: cannot parse {line!r}") from None
        if index != len(values):
            raise FormatError(f"{name}: line {lineno}: index {index} out of sequence")
        values.append(value)
    if not values:
        raise FormatError(f"{name}: no data rows after header (line 1)")
    return np.array(values, dtype=np.float64)


def read_series(path) -> tuple[np.ndarray, dict]:
    """Load a series written by :func:`write_series`; format is sniffed.

    Metadata comes from the binary header or, for CSV, from a ``.json``
    sidecar next to the file when one exists.
    """
    path = Path(path)
    raw = path.read_bytes()
    if raw.startswith(MAGIC):
        return _parse_binary(raw, str(path))
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not UTF-8 text at offset {exc.start}") from None
    values = _parse_csv(text, str(path))
    meta = {}
    sidecar = sidecar_path(path)
    if sidecar.exists():
        try:
            info = json.loads(sidecar.read_text())
        except json.JSONDecodeError as exc:
            raise FormatError(f"{sidecar}: line {exc.lineno}: {exc.msg}") from None
        meta = info.get("series", {})
    return values, meta


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")
