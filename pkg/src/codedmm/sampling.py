"""Sampling plans for coded set-wise and coded independent sampling.

Both schemes pick ``s`` of the ``m`` block indices and bake the unbiasing
factor into the encoding scales, so decoding the MatDot middle coefficient
directly yields the estimator.

* set-wise: one size-``s`` subset ``S`` drawn with probability ``P_S``; every
  slot is scaled by ``1/sqrt(c * P_S)`` with ``c = C(m-1, s-1)``.
* independent: ``s`` indices drawn i.i.d. from ``P_q``; slot ``t`` is scaled
  by ``1/sqrt(s * P_{q_t})``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BiasWarning, DegenerateInput, DimensionMismatch, InvalidSampleSize
from .linalg import frobenius_norm

PROB_TOL = 1e-12


class Scheme(str, enum.Enum):
    EXACT = "exact"
    SETWISE = "setwise"
    INDEPENDENT = "independent"


def _check_sizes(m: int, s: int) -> None:
    if m < 1 or s < 1 or s > m:
        raise InvalidSampleSize(f"need 1 <= s <= m, got m={m}, s={s}")


def _check_probs(probs: np.ndarray) -> None:
    if np.any(probs < 0) or not np.all(np.isfinite(probs)):
        raise ValueError("probabilities must be finite and nonnegative")
    if abs(probs.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")


def constant_c(m: int, s: int) -> float:
    """``C(m, s) * s / m``: how many size-``s`` subsets contain a given index."""
    _check_sizes(m, s)
    return float(math.comb(m, s) * s // m)


@dataclass(frozen=True)
class SetwiseDistribution:
    m: int
    s: int
    probs: np.ndarray
    subsets: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        _check_sizes(self.m, self.s)
        subsets = tuple(itertools.combinations(range(self.m), self.s))
        if self.subsets and tuple(map(tuple, self.subsets)) != subsets:
            raise ValueError("subsets must be all size-s combinations in lexicographic order")
        object.__setattr__(self, "subsets", subsets)
        probs = np.array(self.probs, dtype=np.float64)
        if probs.shape != (len(subsets),):
            raise ValueError(f"expected {len(subsets)} subset probabilities, got {probs.shape}")
        _check_probs(probs)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return dict(zip(self.subsets, self.probs.tolist()))

    def prob(self, subset) -> float:
        return float(self.probs[self.subsets.index(tuple(sorted(subset)))])


@dataclass(frozen=True)
class IndexDistribution:
    m: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        if self.m < 1 or probs.shape != (self.m,):
            raise ValueError(f"expected {self.m} index probabilities, got {probs.shape}")
        _check_probs(probs)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)


@dataclass(frozen=True)
class SamplingPlan:
    scheme: Scheme
    s: int
    sampled_indices: tuple[int, ...]
    scale_a: tuple[float, ...]
    scale_b: tuple[float, ...]
    post_scale: float = 1.0
    c: float | None = None


def _subset_norms(products: Sequence[np.ndarray], s: int) -> np.ndarray:
    m = len(products)
    _check_sizes(m, s)
    shape = np.shape(products[0])
    if any(np.shape(p) != shape for p in products):
        raise DimensionMismatch("block products have heterogeneous shapes")
    # one matrix addition per subset; the m block products are computed once upstream
    stack = np.stack(products)
    return np.array(
        [frobenius_norm(stack[list(sub)].sum(axis=0)) for sub in itertools.combinations(range(m), s)]
    )


def optimal_setwise_distribution(products: Sequence[np.ndarray], s: int) -> SetwiseDistribution:
    """``P_S`` proportional to ``||sum_{q in S} A_q B_q||_F``."""
    norms = _subset_norms(products, s)
    total = norms.sum()
    if total == 0:
        raise DegenerateInput("every subset sum is zero; A @ B = 0")
    return SetwiseDistribution(len(products), s, norms / total)


def uniform_setwise_distribution(m: int, s: int) -> SetwiseDistribution:
    _check_sizes(m, s)
    n = math.comb(m, s)
    return SetwiseDistribution(m, s, np.full(n, 1.0 / n))


def optimal_index_distribution(products: Sequence[np.ndarray]) -> IndexDistribution:
    """``P_q`` proportional to ``||A_q B_q||_F``.

    This minimises ``sum_q ||A_q B_q||_F**2 / P_q`` over the simplex, which is
    the only distribution-dependent part of the independent-scheme error.
    """
    if not len(products):
        raise InvalidSampleSize("need at least one block product")
    norms = np.array([frobenius_norm(p) for p in products])
    total = norms.sum()
    if total == 0:
        raise DegenerateInput("every block product is zero; A @ B = 0")
    return IndexDistribution(len(products), norms / total)


def uniform_index_distribution(m: int) -> IndexDistribution:
    if m < 1:
        raise InvalidSampleSize(f"need m >= 1, got {m}")
    return IndexDistribution(m, np.full(m, 1.0 / m))


def check_unbiased_support(products, dist: SetwiseDistribution | IndexDistribution, strict=True):
    """Reject distributions that put zero mass on an outcome carrying signal.

    Such a distribution silently biases the estimator. Returns the offending
    outcomes when ``strict`` is false.
    """
    if isinstance(dist, SetwiseDistribution):
        norms = _subset_norms(products, dist.s)
        outcomes = dist.subsets
    else:
        norms = np.array([frobenius_norm(p) for p in products])
        outcomes = tuple((q,) for q in range(dist.m))
    bad = [o for o, p, nrm in zip(outcomes, dist.probs, norms) if p == 0 and nrm > 0]
    if bad and strict:
        raise BiasWarning(f"zero probability on outcomes with nonzero block sum: {bad}")
    return bad


def exact_plan(m: int) -> SamplingPlan:
    ones = (1.0,) * m
    return SamplingPlan(Scheme.EXACT, m, tuple(range(m)), ones, ones, 1.0, 1.0)


def _setwise_plan(dist: SetwiseDistribution, j: int) -> SamplingPlan:
    c = constant_c(dist.m, dist.s)
    scale = 1.0 / math.sqrt(c * dist.probs[j])
    sc = (scale,) * dist.s
    return SamplingPlan(Scheme.SETWISE, dist.s, dist.subsets[j], sc, sc, 1.0, c)


def _independent_plan(dist: IndexDistribution, idx) -> SamplingPlan:
    s = len(idx)
    sc = tuple(1.0 / math.sqrt(s * dist.probs[q]) for q in idx)
    return SamplingPlan(Scheme.INDEPENDENT, s, tuple(int(q) for q in idx), sc, sc, 1.0, None)


def draw_setwise(dist: SetwiseDistribution, rng: np.random.Generator) -> SamplingPlan:
    j = int(rng.choice(len(dist.subsets), p=dist.probs))
    return _setwise_plan(dist, j)


def draw_independent(dist: IndexDistribution, s: int, rng: np.random.Generator) -> SamplingPlan:
    if s < 1:
        raise InvalidSampleSize(f"s must be >= 1, got {s}")
    return _independent_plan(dist, rng.choice(dist.m, size=s, p=dist.probs))


def draw_setwise_batch(dist: SetwiseDistribution, n: int, rng: np.random.Generator):
    """``n`` set-wise draws as arrays ``(indices, scales)``, each of shape (n, s)."""
    j = rng.choice(len(dist.subsets), size=n, p=dist.probs)
    subsets = np.array(dist.subsets, dtype=np.intp).reshape(len(dist.subsets), dist.s)
    c = constant_c(dist.m, dist.s)
    scales = np.repeat((1.0 / np.sqrt(c * dist.probs[j]))[:, None], dist.s, axis=1)
    return subsets[j], scales


def draw_independent_batch(dist: IndexDistribution, s: int, n: int, rng: np.random.Generator):
    """``n`` independent-scheme draws as arrays ``(indices, scales)``."""
    if s < 1:
        raise InvalidSampleSize(f"s must be >= 1, got {s}")
    idx = rng.choice(dist.m, size=(n, s), p=dist.probs)
    return idx, 1.0 / np.sqrt(s * dist.probs[idx])


def direct_estimate(products: Sequence[np.ndarray], plan: SamplingPlan) -> np.ndarray:
    """The estimator without any coding: ``sum_t sa[t] * sb[t] * A_{q_t} B_{q_t}``."""
    out = np.zeros(np.shape(products[0]))
    for q, sa, sb in zip(plan.sampled_indices, plan.scale_a, plan.scale_b):
        out += sa * sb * products[q]
    return out * plan.post_scale


def estimator_post_scale(plan: SamplingPlan, decoded: np.ndarray) -> np.ndarray:
    """Final step of the estimator after MatDot decoding.

    The unbiasing factors already sit in the encoding scales, so the product
    of slot scales is ``1/(c P_S)`` (set-wise) or ``1/(s P_q)`` (independent)
    and ``post_scale`` is 1; this is the one place that chain is applied.
    """
    return decoded * plan.post_scale if plan.post_scale != 1.0 else decoded
