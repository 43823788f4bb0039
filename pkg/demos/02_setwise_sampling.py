"""
Coded set-wise sampling
=======================

Sample s of the m block indices as one subset S and encode only those blocks.
The recovery threshold drops from 2m-1 to 2s-1, at the price of an unbiased
but noisy estimate of AB.
"""

import numpy as np

from codedmm import (
    block_products,
    decode,
    draw_setwise,
    encode,
    estimator_post_scale,
    expected_error_setwise_general,
    expected_error_setwise_optimal,
    frobenius_norm_sq,
    make_points,
    optimal_setwise_distribution,
    partition,
    uniform_setwise_distribution,
)

rng = np.random.default_rng(1)
m = 4
A = rng.uniform(-1, 1, (60, 4))
B = rng.uniform(-1, 1, (4, 60))
AB = A @ B
products = block_products(A, B, m)

###############################################################################
# Expected normalized error for each s, optimal vs uniform subset probabilities.
for s in range(1, m + 1):
    opt = expected_error_setwise_optimal(products, s)
    uni = expected_error_setwise_general(products, uniform_setwise_distribution(m, s))
    print(f"s={s} K={2 * s - 1}: optimal {opt / frobenius_norm_sq(AB):.4f}  uniform {uni / frobenius_norm_sq(AB):.4f}")

###############################################################################
# One coded round with s = 2: draw S, encode, decode from three workers.
dist = optimal_setwise_distribution(products, 2)
plan = draw_setwise(dist, rng)
pa, pb = partition(A, m, "columns"), partition(B, m, "rows")
tasks = encode([pa[q] for q in plan.sampled_indices], [pb[q] for q in plan.sampled_indices],
               plan.scale_a, plan.scale_b, make_points(5))
est = estimator_post_scale(plan, decode([t.compute() for t in tasks[:3]], plan.s))
print("sampled subset", plan.sampled_indices, "normalized error", frobenius_norm_sq(AB - est) / frobenius_norm_sq(AB))
