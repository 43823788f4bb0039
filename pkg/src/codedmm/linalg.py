"""Dense matrix helpers: products, Frobenius norms and block partitions.

Matrices are plain 2-D ``float64`` numpy arrays. The helpers here only add the
shape checks and error types the rest of the package relies on.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, IndivisibleDimension, NonFiniteEntry, ParseError


class Axis(str, enum.Enum):
    COLUMNS = "columns"
    ROWS = "rows"


def as_matrix(x) -> np.ndarray:
    """Return ``x`` as a 2-D float64 array, rejecting NaN/inf and empty shapes."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got ndim={arr.ndim}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionMismatch(f"matrix must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteEntry("matrix contains NaN or infinite entries")
    return arr


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def frobenius_norm_sq(m) -> float:
    m = np.asarray(m, dtype=np.float64)
    return float(np.sum(m * m))


def frobenius_norm(m) -> float:
    m = np.asarray(m, dtype=np.float64)
    big = float(np.max(np.abs(m))) if m.size else 0.0
    if big == 0.0:
        return 0.0
    # rescale so tiny (subnormal) or huge entries do not under/overflow when squared
    return big * float(np.sqrt(frobenius_norm_sq(m / big)))


@dataclass(frozen=True)
class BlockPartition:
    """The ``m`` column blocks of A (``Axis.COLUMNS``) or row blocks of B."""

    source_shape: tuple[int, int]
    m: int
    axis: Axis
    blocks: tuple[np.ndarray, ...]

    def __len__(self):
        return self.m

    def __getitem__(self, q):
        return self.blocks[q]

    def assemble(self) -> np.ndarray:
        return assemble(self)


def partition(m_in, m: int, axis: Axis | str) -> BlockPartition:
    mat = as_matrix(m_in)
    axis = Axis(axis)
    if m < 1:
        raise IndivisibleDimension(f"block count must be >= 1, got {m}")
    dim = mat.shape[1] if axis is Axis.COLUMNS else mat.shape[0]
    if dim % m:
        raise IndivisibleDimension(f"{m} does not divide the {axis.value} dimension {dim}")
    width = dim // m
    blocks = []
    for q in range(m):
        sl = slice(q * width, (q + 1) * width)
        blk = mat[:, sl] if axis is Axis.COLUMNS else mat[sl, :]
        blk = blk.copy()
        blk.setflags(write=False)
        blocks.append(blk)
    return BlockPartition(mat.shape, m, axis, tuple(blocks))


def assemble(part: BlockPartition) -> np.ndarray:
    along = 1 if part.axis is Axis.COLUMNS else 0
    return np.concatenate(part.blocks, axis=along)


def block_products(a, b, m: int) -> list[np.ndarray]:
    """Per-index products ``A_q @ B_q`` for the column/row split of A and B."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    pa = partition(a, m, Axis.COLUMNS)
    pb = partition(b, m, Axis.ROWS)
    return [pa[q] @ pb[q] for q in range(m)]


def block_sum(blocks: Sequence[np.ndarray], indices: Iterable[int]) -> np.ndarray:
    if not blocks:
        raise DimensionMismatch("need at least one block to fix the shape")
    shape = np.shape(blocks[0])
    if any(np.shape(blk) != shape for blk in blocks):
        raise DimensionMismatch("blocks have heterogeneous shapes")
    out = np.zeros(shape, dtype=np.float64)
    for q in indices:
        if not 0 <= q < len(blocks):
            raise IndexError(f"block index {q} out of range for {len(blocks)} blocks")
        out += blocks[q]
    return out


def read_matrix_csv(path) -> np.ndarray:
    """Read a headerless CSV of decimal literals, one matrix row per line."""
    rows = []
    with open(path, newline="") as f:
        for lineno, row in enumerate(csv.reader(f), 1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            if len(rows[-1]) != len(rows[0]):
                raise ParseError(
                    f"{path}:{lineno}: ragged row ({len(rows[-1])} values, expected {len(rows[0])})"
                )
    if not rows:
        raise ParseError(f"{path}: no matrix rows")
    try:
        return as_matrix(rows)
    except NonFiniteEntry as exc:
        raise ParseError(f"{path}: {exc}") from None


def write_matrix_csv(mat, path) -> None:
    mat = as_matrix(mat)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        for row in mat:
            w.writerow([repr(float(v)) for v in row])
