"""
Exact products from any 2m-1 workers
====================================

Split A into m column blocks and B into m row blocks, encode them as matrix
polynomials, and let each of N workers multiply one evaluation. The product
AB is the middle coefficient, so any 2m-1 answers recover it.
"""

import itertools
import math

import numpy as np

from codedmm import block_products, decode, encode, frobenius_norm, make_points, partition

rng = np.random.default_rng(0)
m, n_workers = 3, 8
A = rng.uniform(-1, 1, (6, 12))
B = rng.uniform(-1, 1, (12, 5))

pa = partition(A, m, "columns")
pb = partition(B, m, "rows")
tasks = encode(pa.blocks, pb.blocks, [1] * m, [1] * m, make_points(n_workers))
answers = [task.compute() for task in tasks]

# The block products add up to AB.
print("sum of block products == AB:", np.allclose(sum(block_products(A, B, m)), A @ B))

###############################################################################
# Decode from every possible set of 2m-1 = 5 responders.
worst = 0.0
for ids in itertools.combinations(range(n_workers), 2 * m - 1):
    est = decode([answers[i] for i in ids], m)
    worst = max(worst, frobenius_norm(est - A @ B) / frobenius_norm(A @ B))
print(f"worst relative error over all {math.comb(n_workers, 2 * m - 1)} subsets: {worst:.2e}")
