"""Matrix interchange files.

Binary layout (all integers little-endian)::

    8 bytes   magic  b"PPDUMP01"
    4 bytes   uint32 header length H
    H bytes   UTF-8 JSON header: rows, cols, dtype ("complex128"),
              endianness ("little"), order ("row-major"),
              basis_row / basis_col (basis descriptors or null), label
    rows*cols*16 bytes  entries as (re, im) float64 pairs, row-major

Text layout: one JSON object with the same header fields plus
``"entries"``, a list of rows of ``[re, im]`` pairs.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from .errors import StructureError
from .fock import FockBasis, SectorOperator, basis_from_descriptor

MAGIC = b"PPDUMP01"
TEXT_FORMAT = "passive-purify-matrix"


def _header(mat: np.ndarray, basis_row: Optional[FockBasis], basis_col: Optional[FockBasis], label):
    return {
        "rows": int(mat.shape[0]),
        "cols": int(mat.shape[1]),
        "dtype": "complex128",
        "endianness": "little",
        "order": "row-major",
        "basis_row": None if basis_row is None else basis_row.describe(),
        "basis_col": None if basis_col is None else basis_col.describe(),
        "label": label,
    }


def write_matrix(path, mat, basis_row=None, basis_col=None, fmt: str = "binary", label=None) -> None:
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2:
        raise StructureError("only 2-d matrices can be dumped")
    head = _header(mat, basis_row, basis_col, label)
    path = Path(path)
    if fmt == "binary":
        blob = json.dumps(head, sort_keys=True).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", len(blob)))
            fh.write(blob)
            fh.write(np.ascontiguousarray(mat, dtype="<c16").tobytes())
    elif fmt == "text":
        head["format"] = TEXT_FORMAT
        head["entries"] = [[[float(z.real), float(z.imag)] for z in row] for row in mat]
        path.write_text(json.dumps(head, sort_keys=True) + "\n")
    else:
        raise StructureError(f"unknown dump format {fmt!r}")


def write_operator(path, op: SectorOperator, fmt: str = "binary", label=None) -> None:
    write_matrix(path, op.entries, op.basis_row, op.basis_col, fmt, label)


def read_matrix(path) -> Tuple[np.ndarray, dict]:
    """Read either layout; returns the matrix and its header."""
    raw = Path(path).read_bytes()
    if raw.startswith(MAGIC):
        (hlen,) = struct.unpack("<I", raw[8:12])
        head = json.loads(raw[12:12 + hlen].decode("utf-8"))
        rows, cols = head["rows"], head["cols"]
        data = np.frombuffer(raw[12 + hlen:], dtype="<c16")
        if data.size != rows * cols:
            raise StructureError(f"payload has {data.size} entries, header says {rows * cols}")
        return data.reshape(rows, cols).astype(complex), head
    head = json.loads(raw.decode("utf-8"))
    if head.get("format") != TEXT_FORMAT:
        raise StructureError(f"{path} is not a matrix dump")
    pairs = np.asarray(head.pop("entries"), dtype=float).reshape(head["rows"], head["cols"], 2)
    return pairs[..., 0] + 1j * pairs[..., 1], head


def read_operator(path) -> SectorOperator:
    mat, head = read_matrix(path)
    if head["basis_row"] is None or head["basis_col"] is None:
        raise StructureError("dump carries no basis descriptors")
    return SectorOperator(
        basis_from_descriptor(head["basis_row"]), basis_from_descriptor(head["basis_col"]), mat
    )
