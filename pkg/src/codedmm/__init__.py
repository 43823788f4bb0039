"""Approximate coded distributed matrix multiplication.

MatDot codes give straggler tolerance: the product is decodable from any
``2s-1`` workers. Sampling ``s`` of the ``m`` blocks (set-wise or
independently) trades that threshold against an unbiased approximation error.
"""

from .analysis import (
    ErrorReport,
    empirical_error,
    expected_error_independent,
    expected_error_independent_optimal,
    expected_error_setwise_general,
    expected_error_setwise_optimal,
    monte_carlo_error,
)
from .cluster import Constant, Deterministic, ShiftedExponential, SimOutcome, recovery_threshold, run_round
from .linalg import Axis, BlockPartition, block_products, block_sum, frobenius_norm, frobenius_norm_sq, matmul, partition
from .matdot import EncodedTask, PointStrategy, WorkerAnswer, decode, encode, make_points, middle_coeff_weights
from .sampling import (
    IndexDistribution,
    SamplingPlan,
    Scheme,
    SetwiseDistribution,
    constant_c,
    draw_independent,
    draw_setwise,
    estimator_post_scale,
    optimal_index_distribution,
    optimal_setwise_distribution,
    uniform_index_distribution,
    uniform_setwise_distribution,
)

__version__ = "0.1.0"
