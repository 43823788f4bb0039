"""Reference computations that share no code with the package.

Everything here recomputes from the raw matrices with slicing and plain loops,
so agreement with the library is evidence, not tautology.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def naive_matmul(a, b):
    n, k = len(a), len(a[0])
    p = len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(p)] for i in range(n)]


def gauss_inverse(mat):
    """Exact inverse by Gauss-Jordan elimination over the rationals."""
    n = len(mat)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        lead = aug[col][col]
        aug[col] = [x / lead for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def count_subsets_containing(m, s, q=0):
    return sum(1 for sub in itertools.combinations(range(m), s) if q in sub)


def _cols(m, d2):
    w = d2 // m
    return [slice(q * w, (q + 1) * w) for q in range(m)]


def subset_product(a, b, m, subset):
    sl = _cols(m, a.shape[1])
    return sum(a[:, sl[q]] @ b[sl[q], :] for q in subset)


def setwise_enumeration(a, b, m, s, probs):
    """Exact ``E[est]`` and ``E||AB - est||_F^2`` for set-wise sampling.

    ``probs`` maps each size-s subset (sorted tuple) to its probability.
    """
    ab = a @ b
    c = count_subsets_containing(m, s)
    mean = np.zeros_like(ab)
    err = 0.0
    for sub in itertools.combinations(range(m), s):
        p = probs[sub]
        if p == 0:
            continue
        est = subset_product(a, b, m, sub) / (c * p)
        mean += p * est
        err += p * np.sum((ab - est) ** 2)
    return mean, err


def independent_enumeration(a, b, m, s, probs):
    """Exact ``E[est]`` and ``E||AB - est||_F^2`` over all ``m**s`` index tuples."""
    ab = a @ b
    mean = np.zeros_like(ab)
    err = 0.0
    for tup in itertools.product(range(m), repeat=s):
        w = np.prod([probs[q] for q in tup])
        if w == 0:
            continue
        est = sum(subset_product(a, b, m, [q]) / (s * probs[q]) for q in tup)
        mean += w * est
        err += w * np.sum((ab - est) ** 2)
    return mean, err


def brute_optimal_setwise(a, b, m, s):
    """P_S proportional to the norm of each subset's product, recomputed from scratch."""
    subs = list(itertools.combinations(range(m), s))
    norms = np.array([np.sqrt(np.sum(subset_product(a, b, m, sub) ** 2)) for sub in subs])
    return dict(zip(subs, norms / norms.sum()))


def simplex_grid(m, resolution):
    n = round(1 / resolution)
    for cut in itertools.combinations(range(n + m - 1), m - 1):
        parts = np.diff((-1, *cut, n + m - 1)) - 1
        yield parts / n
