"""Closed-form and Monte Carlo approximation errors for the coded samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import sampling as smp
from .cluster import ShiftedExponential, run_rounds
from .errors import DegenerateInput, DimensionMismatch, InfiniteVariance, InvalidSampleSize
from .linalg import Axis, as_matrix, frobenius_norm, frobenius_norm_sq, partition
from .matdot import PointStrategy, make_points


def _total(products) -> np.ndarray:
    return np.sum(np.stack(products), axis=0)


def expected_error_setwise_general(products: Sequence[np.ndarray], dist: smp.SetwiseDistribution) -> float:
    """``E||AB - est||_F^2 = (1/c^2) sum_S ||sum_{q in S} A_q B_q||_F^2 / P_S - ||AB||_F^2``."""
    m, s = dist.m, dist.s
    if len(products) != m:
        raise DimensionMismatch(f"distribution is over {m} blocks, got {len(products)} products")
    if s == m:
        return 0.0
    stack = np.stack(products)
    c = smp.constant_c(m, s)
    acc = 0.0
    for sub, p in zip(dist.subsets, dist.probs):
        nsq = frobenius_norm_sq(stack[list(sub)].sum(axis=0))
        if p == 0:
            if nsq > 0:
                raise InfiniteVariance(f"P_S = 0 for subset {sub} with nonzero block sum")
            continue
        acc += nsq / p
    return acc / c**2 - frobenius_norm_sq(_total(products))


def expected_error_setwise_optimal(products: Sequence[np.ndarray], s: int) -> float:
    """Set-wise error at the optimal ``P_S``: ``(sum_S ||.||_F)^2 / c^2 - ||AB||_F^2``."""
    m = len(products)
    norms = smp._subset_norms(products, s)
    if norms.sum() == 0:
        raise DegenerateInput("every subset sum is zero")
    if s == m:
        return 0.0
    c = smp.constant_c(m, s)
    return norms.sum() ** 2 / c**2 - frobenius_norm_sq(_total(products))


def expected_error_independent(products: Sequence[np.ndarray], dist: smp.IndexDistribution, s: int) -> float:
    """``(1/s) (sum_q ||A_q B_q||_F^2 / P_q - ||AB||_F^2)`` for ``s`` i.i.d. draws."""
    if len(products) != dist.m:
        raise DimensionMismatch(f"distribution is over {dist.m} blocks, got {len(products)} products")
    if s < 1:
        raise InvalidSampleSize(f"s must be >= 1, got {s}")
    if dist.m == 1:
        return 0.0
    acc = 0.0
    for q, p in enumerate(dist.probs):
        nsq = frobenius_norm_sq(products[q])
        if p == 0:
            if nsq > 0:
                raise InfiniteVariance(f"P_q = 0 for block {q} with nonzero product")
            continue
        acc += nsq / p
    return (acc - frobenius_norm_sq(_total(products))) / s


def expected_error_independent_optimal(products: Sequence[np.ndarray], s: int) -> float:
    """``((sum_q ||A_q B_q||_F)^2 - ||AB||_F^2) / s``."""
    norms = np.array([frobenius_norm(p) for p in products])
    if norms.sum() == 0:
        raise DegenerateInput("every block product is zero")
    if len(products) == 1:
        return 0.0
    return (norms.sum() ** 2 - frobenius_norm_sq(_total(products))) / s


def empirical_error(truth, estimate) -> tuple[float, float]:
    truth = np.asarray(truth, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    if truth.shape != estimate.shape:
        raise DimensionMismatch(f"shapes differ: {truth.shape} vs {estimate.shape}")
    sq = frobenius_norm_sq(truth - estimate)
    ref = frobenius_norm_sq(truth)
    if ref == 0:
        raise DegenerateInput("||AB||_F = 0, normalized error undefined", sq_error=sq)
    return sq, sq / ref


@dataclass(frozen=True)
class ErrorReport:
    analytic_expected_sq_error: float
    empirical_sq_error: float
    empirical_std_error: float
    normalized_empirical: float
    frob_sq_ab: float
    trials: int

    @property
    def normalized_analytic(self) -> float:
        return self.analytic_expected_sq_error / self.frob_sq_ab


def make_distribution(products, scheme: smp.Scheme | str, dist: str, s: int):
    """Build the sampling distribution named by ``(scheme, dist)``.

    Returns ``None`` for the exact scheme, which samples nothing.
    """
    scheme = smp.Scheme(scheme)
    m = len(products)
    if scheme is smp.Scheme.EXACT:
        return None
    if scheme is smp.Scheme.SETWISE:
        if dist == "optimal":
            return smp.optimal_setwise_distribution(products, s)
        if dist == "uniform":
            return smp.uniform_setwise_distribution(m, s)
    else:
        if dist == "optimal":
            return smp.optimal_index_distribution(products)
        if dist == "uniform":
            return smp.uniform_index_distribution(m)
    raise ValueError(f"unknown distribution {dist!r}")


def analytic_error(products, scheme: smp.Scheme | str, distribution, s: int) -> float:
    scheme = smp.Scheme(scheme)
    if scheme is smp.Scheme.EXACT or distribution is None:
        return 0.0
    if scheme is smp.Scheme.SETWISE:
        return expected_error_setwise_general(products, distribution)
    return expected_error_independent(products, distribution, s)


def draw_batch(scheme: smp.Scheme | str, distribution, s: int, m: int, n: int, rng):
    """Sampling draws for ``n`` rounds as ``(indices, scales)`` arrays."""
    scheme = smp.Scheme(scheme)
    if scheme is smp.Scheme.EXACT or distribution is None:
        return np.tile(np.arange(m), (n, 1)), np.ones((n, m))
    if scheme is smp.Scheme.SETWISE:
        return smp.draw_setwise_batch(distribution, n, rng)
    return smp.draw_independent_batch(distribution, s, n, rng)


def monte_carlo_error(
    a,
    b,
    m: int,
    scheme: smp.Scheme | str,
    dist: str = "optimal",
    s: int | None = None,
    trials: int = 10_000,
    seed: int = 0,
    n_workers: int | None = None,
    latency=None,
    points: PointStrategy | str = PointStrategy.CHEBYSHEV,
) -> ErrorReport:
    """Mean squared error of the full coded pipeline over ``trials`` rounds.

    Each round draws a sample, encodes it for ``n_workers`` workers, keeps the
    fastest ``2s-1`` under ``latency`` and decodes. ``n_workers`` defaults to
    ``2m+2``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    scheme = smp.Scheme(scheme)
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    pa = partition(a, m, Axis.COLUMNS)
    pb = partition(b, m, Axis.ROWS)
    products = [pa[q] @ pb[q] for q in range(m)]
    truth = _total(products)
    frob_sq = frobenius_norm_sq(truth)
    if s is None or scheme is smp.Scheme.EXACT:
        s = m
    try:
        distribution = make_distribution(products, scheme, dist, s)
    except DegenerateInput:
        scheme, distribution = smp.Scheme.EXACT, None
    analytic = analytic_error(products, scheme, distribution, s)
    if scheme is smp.Scheme.EXACT:
        s = m

    n_workers = n_workers or 2 * m + 2
    pts = make_points(n_workers, points)
    latency = latency or ShiftedExponential()
    rng = np.random.default_rng(seed)
    idx, scales = draw_batch(scheme, distribution, s, m, trials, rng)
    out = run_rounds(np.stack(pa.blocks), np.stack(pb.blocks), idx, scales, scales, pts, latency, rng, truth)
    sq = out.sq_error
    mean = math.fsum(sq) / trials
    sem = float(np.std(sq, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return ErrorReport(
        analytic_expected_sq_error=analytic,
        empirical_sq_error=mean,
        empirical_std_error=sem,
        normalized_empirical=mean / frob_sq if frob_sq > 0 else math.nan,
        frob_sq_ab=frob_sq,
        trials=trials,
    )

