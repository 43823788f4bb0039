"""MatDot encoding and middle-coefficient decoding.

Worker ``n`` gets the pair

    a_tilde = sum_l  sa[l] * A_l * x_n**l
    b_tilde = sum_l  sb[l] * B_l * x_n**(s-1-l)

so its answer ``a_tilde @ b_tilde`` is a matrix polynomial of degree ``2s-2``
in ``x_n`` whose ``x**(s-1)`` coefficient is ``sum_l sa[l]*sb[l]*A_l@B_l``.
Any ``2s-1`` answers at distinct points determine that coefficient.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicatePoints,
    InsufficientEvaluations,
    NonPositiveScale,
)
from .linalg import as_matrix


class PointStrategy(str, enum.Enum):
    CHEBYSHEV = "chebyshev"
    INTEGER = "integer"


@dataclass(frozen=True)
class EncodedTask:
    worker_id: int
    point: float
    a_tilde: np.ndarray
    b_tilde: np.ndarray

    def compute(self, finish_time: float = 0.0) -> "WorkerAnswer":
        """What the worker does: multiply its two encoded blocks."""
        return WorkerAnswer(self.worker_id, self.point, self.a_tilde @ self.b_tilde, finish_time)


@dataclass(frozen=True)
class WorkerAnswer:
    worker_id: int
    point: float
    z: np.ndarray
    finish_time: float = 0.0


def check_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64).ravel()
    if np.any(pts == 0):
        raise DuplicatePoints("evaluation points must be nonzero")
    if len(np.unique(pts)) != len(pts):
        raise DuplicatePoints(f"evaluation points are not pairwise distinct: {pts}")
    return pts


def make_points(n_workers: int, strategy: PointStrategy | str = PointStrategy.CHEBYSHEV) -> np.ndarray:
    """Distinct nonzero evaluation points ``x_0..x_{N-1}``, one per worker."""
    if n_workers < 1:
        raise ValueError(f"need at least one worker, got {n_workers}")
    strategy = PointStrategy(strategy)
    if strategy is PointStrategy.INTEGER:
        return np.arange(1, n_workers + 1, dtype=np.float64)
    k = np.arange(n_workers)
    pts = np.cos((2 * k + 1) * np.pi / (2 * n_workers))
    # odd N puts a node at cos(pi/2) ~ 6e-17; neighbours sit ~2/N away
    pts[np.abs(pts) < 1e-12] = 1.0 / (4 * n_workers)
    return check_points(pts)


def encode(blocks_a, blocks_b, scales_a, scales_b, points) -> list[EncodedTask]:
    s = len(blocks_a)
    if s < 1 or not (len(blocks_b) == len(scales_a) == len(scales_b) == s):
        raise DimensionMismatch("blocks and scales must all have the same length s >= 1")
    blocks_a = [as_matrix(blk) for blk in blocks_a]
    blocks_b = [as_matrix(blk) for blk in blocks_b]
    if len({blk.shape for blk in blocks_a}) != 1 or len({blk.shape for blk in blocks_b}) != 1:
        raise DimensionMismatch("blocks within A (or within B) must share one shape")
    if blocks_a[0].shape[1] != blocks_b[0].shape[0]:
        raise DimensionMismatch(
            f"A blocks {blocks_a[0].shape} and B blocks {blocks_b[0].shape} are not conformable"
        )
    sa = np.asarray(scales_a, dtype=np.float64)
    sb = np.asarray(scales_b, dtype=np.float64)
    if np.any(~(sa > 0)) or np.any(~(sb > 0)):
        raise NonPositiveScale("encoding scales must be strictly positive")
    pts = check_points(points)

    stack_a = np.stack(blocks_a) * sa[:, None, None]
    stack_b = np.stack(blocks_b) * sb[:, None, None]
    tasks = []
    for n, x in enumerate(pts):
        pw = x ** np.arange(s)
        a_tilde = np.tensordot(pw, stack_a, axes=1)
        b_tilde = np.tensordot(pw[::-1], stack_b, axes=1)
        tasks.append(EncodedTask(n, float(x), a_tilde, b_tilde))
    return tasks


def _monic_from_roots(roots) -> np.ndarray:
    """Coefficients (lowest degree first) of ``prod_j (x - roots[j])``."""
    c = np.ones(1)
    for r in roots:
        c = np.concatenate(([0.0], c)) - r * np.concatenate((c, [0.0]))
    return c


def middle_coeff_weights(points, s: int) -> np.ndarray:
    """Weights ``w`` with ``sum_k w[k] * p(x_k)`` = coefficient ``s-1`` of ``p``.

    Valid for every ``p`` of degree at most ``2s-2``. Entry ``k`` is the
    ``x**(s-1)`` coefficient of the k-th Lagrange cardinal polynomial, which is
    row ``s-1`` of the inverse Vandermonde matrix.
    """
    pts = np.asarray(points, dtype=np.float64).ravel()
    need = 2 * s - 1
    if s < 1:
        raise InsufficientEvaluations(f"s must be >= 1, got {s}")
    if len(pts) < need:
        raise InsufficientEvaluations(f"need {need} evaluations for s={s}, got {len(pts)}")
    if len(pts) > need:
        raise ValueError(f"expected exactly {need} points for s={s}, got {len(pts)}")
    if len(np.unique(pts)) != need:
        raise DuplicatePoints(f"interpolation nodes are not distinct: {pts}")

    w = np.empty(need)
    for k in range(need):
        others = np.delete(pts, k)
        w[k] = _monic_from_roots(others)[s - 1] / math.prod(pts[k] - others)
    return w


def decode(answers: Sequence[WorkerAnswer], s: int) -> np.ndarray:
    """Coefficient of ``x**(s-1)`` from the first ``2s-1`` answers to arrive.

    Answers are ordered by ``(finish_time, worker_id)``; any extra answers past
    the threshold are ignored.
    """
    need = 2 * s - 1
    if len(answers) < need:
        raise InsufficientEvaluations(f"need {need} answers for s={s}, got {len(answers)}")
    used = sorted(answers, key=lambda ans: (ans.finish_time, ans.worker_id))[:need]
    shape = used[0].z.shape
    if any(ans.z.shape != shape for ans in used):
        raise DimensionMismatch("worker answers have different shapes")
    w = middle_coeff_weights([ans.point for ans in used], s)
    return np.tensordot(w, np.stack([ans.z for ans in used]), axes=1)
