"""On-disk formats for integral matrices and the ERI list.

Matrices are text: a ``# <name> <dimension>`` header, then ``i j value`` for
the lower triangle (i >= j), 1-based, values with 17 significant digits.

ERIs are either text (``i j k l value`` per line, 1-based) or binary: the
magic ``GINT``, a version byte, then little-endian records of four int32
indices (1-based) and one float64 value. Both list canonical records only
(i >= j, k >= l, ij >= kl) in ascending (i, j, k, l) order.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable

import numpy as np

MAGIC = b"GINT"
VERSION = 1
_RECORD = struct.Struct("<iiiid")


def _fmt(v: float) -> str:
    return "%.17g" % v


def format_matrix(name: str, dense: np.ndarray) -> str:
    n = dense.shape[0]
    lines = [f"# {name} {n}"]
    for i in range(n):
        for j in range(i + 1):
            lines.append(f"{i + 1} {j + 1} {_fmt(float(dense[i, j]))}")
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> tuple[str, np.ndarray]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError("matrix file must start with a '# name dimension' header")
    _, name, dim = lines[0].split()
    n = int(dim)
    out = np.zeros((n, n))
    for ln in lines[1:]:
        i, j, v = ln.split()
        i, j = int(i) - 1, int(j) - 1
        out[i, j] = out[j, i] = float(v)
    return name, out


def format_eri_text(records: Iterable[tuple[int, int, int, int, float]]) -> str:
    return "".join(
        f"{i + 1} {j + 1} {k + 1} {l + 1} {_fmt(v)}\n" for i, j, k, l, v in records
    )


def parse_eri_text(text: str) -> dict[tuple[int, int, int, int], float]:
    out = {}
    for ln in text.splitlines():
        if not ln.strip():
            continue
        i, j, k, l, v = ln.split()
        out[(int(i) - 1, int(j) - 1, int(k) - 1, int(l) - 1)] = float(v)
    return out


def encode_eri_binary(records: Iterable[tuple[int, int, int, int, float]]) -> bytes:
    body = b"".join(_RECORD.pack(i + 1, j + 1, k + 1, l + 1, v) for i, j, k, l, v in records)
    return MAGIC + bytes([VERSION]) + body


def decode_eri_binary(data: bytes) -> dict[tuple[int, int, int, int], float]:
    if data[:4] != MAGIC:
        raise ValueError("not a GINT file")
    if data[4] != VERSION:
        raise ValueError(f"unsupported GINT version {data[4]}")
    body = data[5:]
    if len(body) % _RECORD.size:
        raise ValueError("truncated GINT record")
    return {
        (i - 1, j - 1, k - 1, l - 1): v for i, j, k, l, v in _RECORD.iter_unpack(body)
    }


def read_eri(path: str | Path) -> dict[tuple[int, int, int, int], float]:
    path = Path(path)
    data = path.read_bytes()
    if data[:4] == MAGIC:
        return decode_eri_binary(data)
    return parse_eri_text(data.decode())
