"""Virtual-time simulation of a master and N workers with stragglers.

Each round assigns every worker a finish time from a latency model; the master
keeps the ``k`` earliest (ties broken by worker id) and decodes from them.
Nothing sleeps: a round is a sort over finish times.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidThreshold, NotEnoughWorkers
from .matdot import EncodedTask, WorkerAnswer, decode, middle_coeff_weights


@dataclass(frozen=True)
class Constant:
    value: float = 1.0

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError("constant delay must be >= 0")

    def sample(self, n_trials, n_workers, rng):
        return np.full((n_trials, n_workers), float(self.value))


@dataclass(frozen=True)
class Deterministic:
    delays: tuple[float, ...]

    def __post_init__(self):
        delays = tuple(float(d) for d in self.delays)
        if not all(d >= 0 for d in delays):
            raise ValueError("deterministic delays must be >= 0")
        object.__setattr__(self, "delays", delays)

    def sample(self, n_trials, n_workers, rng):
        if len(self.delays) != n_workers:
            raise DimensionMismatch(f"{len(self.delays)} delays given for {n_workers} workers")
        return np.tile(np.array(self.delays), (n_trials, 1))


@dataclass(frozen=True)
class ShiftedExponential:
    """``shift + Exp(rate)`` per worker, the usual straggler law."""

    shift: float = 1.0
    rate: float = 1.0

    def __post_init__(self):
        if not self.shift >= 0 or not self.rate > 0:
            raise ValueError("need shift >= 0 and rate > 0")

    def sample(self, n_trials, n_workers, rng):
        return self.shift + rng.exponential(1.0 / self.rate, size=(n_trials, n_workers))


LatencyModel = Constant | Deterministic | ShiftedExponential


def recovery_threshold(s: int) -> int:
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    return 2 * s - 1


def _check_threshold(n_workers: int, k: int) -> int:
    if k < 1 or k % 2 == 0:
        raise InvalidThreshold(f"MatDot thresholds are odd (2s-1); got k={k}")
    if n_workers < k:
        raise NotEnoughWorkers(f"threshold {k} exceeds the {n_workers} available workers")
    return (k + 1) // 2


def fastest(finish_times: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` smallest finish times per row, ties by worker id."""
    order = np.argsort(finish_times, axis=-1, kind="stable")
    return order[..., :k]


@dataclass(frozen=True)
class SimOutcome:
    responders: tuple[int, ...]
    completion_time: float
    answers: tuple[WorkerAnswer, ...]
    decoded: np.ndarray
    finish_times: np.ndarray


def run_round(tasks: Sequence[EncodedTask], model, k: int, rng=None) -> SimOutcome:
    s = _check_threshold(len(tasks), k)
    times = model.sample(1, len(tasks), rng)[0]
    responders = fastest(times, k)
    # only responders do work the master waits for
    answers = tuple(tasks[n].compute(float(times[n])) for n in responders)
    return SimOutcome(
        tuple(int(n) for n in responders),
        float(times[responders[-1]]),
        answers,
        decode(answers, s),
        times,
    )


@dataclass
class BatchOutcome:
    responders: np.ndarray  # (trials, k)
    completion_time: np.ndarray  # (trials,)
    sq_error: np.ndarray  # (trials,)


def run_rounds(
    blocks_a: np.ndarray,
    blocks_b: np.ndarray,
    indices: np.ndarray,
    scales_a: np.ndarray,
    scales_b: np.ndarray,
    points: np.ndarray,
    model,
    rng: np.random.Generator,
    truth: np.ndarray,
    chunk: int = 128,
) -> BatchOutcome:
    """Many independent rounds at once, scored against ``truth``.

    Row ``t`` of ``indices``/``scales_*`` is one sampling draw. Per round the
    responders' pairs are encoded, their products weighted by the decode
    weights and summed, exactly as :func:`run_round` followed by
    :func:`~codedmm.matdot.decode` would, but vectorised over rounds and
    without materialising the individual ``Z_n``.
    """
    blocks_a = np.asarray(blocks_a, dtype=np.float64)
    blocks_b = np.asarray(blocks_b, dtype=np.float64)
    indices = np.asarray(indices)
    n_trials, s = indices.shape
    k = 2 * s - 1
    n_workers = len(points)
    _check_threshold(n_workers, k)

    times = model.sample(n_trials, n_workers, rng)
    responders = fastest(times, k)
    completion = np.take_along_axis(times, responders[:, -1:], axis=1)[:, 0]

    # the decoded coefficient does not depend on answer order, so work with
    # sorted responder sets: at most C(N, k) distinct weight vectors
    used = np.sort(responders, axis=1)
    uniq, inverse = np.unique(used, axis=0, return_inverse=True)
    w_uniq = np.array([middle_coeff_weights(points[row], s) for row in uniq])
    weights = w_uniq[inverse.ravel()]

    x = points[used]  # (T, k)
    pw = x[:, :, None] ** np.arange(s)  # (T, k, s)
    coef_a = pw * scales_a[:, None, :]
    coef_b = pw[:, :, ::-1] * scales_b[:, None, :] * weights[:, :, None]

    d1, bw = blocks_a.shape[1:]
    d3 = blocks_b.shape[2]
    sq_error = np.empty(n_trials)
    for lo in range(0, n_trials, chunk):
        hi = min(lo + chunk, n_trials)
        ga = blocks_a[indices[lo:hi]]  # (t, s, d1, bw)
        gb = blocks_b[indices[lo:hi]]  # (t, s, bw, d3)
        a_tilde = np.einsum("tks,tsib->tikb", coef_a[lo:hi], ga).reshape(hi - lo, d1, k * bw)
        b_tilde = np.einsum("tks,tsbj->tkbj", coef_b[lo:hi], gb).reshape(hi - lo, k * bw, d3)
        diff = a_tilde @ b_tilde
        diff -= truth
        sq_error[lo:hi] = np.einsum("tij,tij->t", diff, diff)
    return BatchOutcome(responders, completion, sq_error)
