"""Plain-text matrix format.

A file holds one or more blocks. Each block starts with a header line
``rows cols field`` (``field`` is ``real`` or ``complex``) followed by
``rows`` lines of whitespace-separated entries. Complex entries are
written ``re+imj`` with no spaces. Values are printed with 17
significant digits so a write/read cycle reproduces every double exactly.
Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import io
import math
from pathlib import Path

import numpy as np

from .exceptions import MatrixFormatError


def _fmt_real(x: float) -> str:
    return f"{x:.17g}"


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


def format_matrix(M, field: str | None = None) -> str:
    M = np.asarray(M)
    if M.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if field is None:
        field = "complex" if np.iscomplexobj(M) and np.any(M.imag != 0) else "real"
    if field not in ("real", "complex"):
        raise ValueError(f"unknown field {field!r}")
    if field == "real" and np.iscomplexobj(M) and np.any(M.imag != 0):
        raise ValueError("cannot write a matrix with nonzero imaginary parts as 'real'")
    rows, cols = M.shape
    out = [f"{rows} {cols} {field}"]
    for row in M:
        if field == "real":
            out.append(" ".join(_fmt_real(float(np.real(x))) for x in row))
        else:
            out.append(" ".join(_fmt_complex(complex(x)) for x in row))
    return "\n".join(out) + "\n"


def _parse_entry(tok: str, field: str, lineno: int) -> complex:
    try:
        val = float(tok) if field == "real" else complex(tok)
    except ValueError:
        raise MatrixFormatError(f"cannot parse {field} entry {tok!r}", lineno) from None
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise MatrixFormatError(f"non-finite entry {tok!r}", lineno)
    return val


def parse_matrices(text: str) -> list[np.ndarray]:
    """Parse every matrix block in ``text``."""
    lines = [
        (i + 1, ln.strip())
        for i, ln in enumerate(text.splitlines())
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    blocks = []
    pos = 0
    while pos < len(lines):
        lineno, header = lines[pos]
        parts = header.split()
        if len(parts) != 3:
            raise MatrixFormatError("header must be 'rows cols field'", lineno)
        try:
            rows, cols = int(parts[0]), int(parts[1])
        except ValueError:
            raise MatrixFormatError("rows and cols must be integers", lineno) from None
        field = parts[2]
        if rows <= 0 or cols <= 0:
            raise MatrixFormatError("rows and cols must be positive", lineno)
        if field not in ("real", "complex"):
            raise MatrixFormatError(f"field must be 'real' or 'complex', got {field!r}", lineno)
        pos += 1
        M = np.empty((rows, cols), dtype=np.complex128 if field == "complex" else np.float64)
        for i in range(rows):
            if pos >= len(lines):
                raise MatrixFormatError(
                    f"expected {rows} rows, found {i}", lines[-1][0] if lines else None
                )
            lineno, body = lines[pos]
            toks = body.split()
            if len(toks) != cols:
                raise MatrixFormatError(f"expected {cols} entries, found {len(toks)}", lineno)
            M[i] = [_parse_entry(t, field, lineno) for t in toks]
            pos += 1
        blocks.append(M)
    if not blocks:
        raise MatrixFormatError("no matrix found", 1)
    return blocks


def parse_matrix(text: str) -> np.ndarray:
    blocks = parse_matrices(text)
    if len(blocks) != 1:
        raise MatrixFormatError(f"expected exactly one matrix, found {len(blocks)}")
    return blocks[0]


def read_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text())


def read_matrices(path) -> list[np.ndarray]:
    return parse_matrices(Path(path).read_text())


def write_matrices(path_or_stream, *matrices) -> None:
    text = "".join(format_matrix(M) for M in matrices)
    if isinstance(path_or_stream, io.TextIOBase) or hasattr(path_or_stream, "write"):
        path_or_stream.write(text)
    else:
        Path(path_or_stream).write_text(text)


write_matrix = write_matrices
