"""Config-driven experiments over the coded samplers, with CSV output.

A config file is flat ``key = value`` text; dotted keys nest (``latency.kind``).
Blank lines and ``#`` comments are ignored. Example::

    d1 = 60
    d2 = 4
    d3 = 60
    m = 4
    workers = 8
    trials = 10000
    seed = 42
    schemes = setwise:optimal:1-4, independent:uniform:1-4, exact
    latency.kind = shifted_exp
    latency.shift = 1.0
    latency.rate = 1.0
    matrix.source = uniform
    matrix.half_width = 1.0
"""

from __future__ import annotations

import csv
import io
import math
import os
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .analysis import analytic_error, draw_batch, make_distribution
from .cluster import Constant, Deterministic, ShiftedExponential, recovery_threshold, run_rounds
from .errors import CodedMMError, DegenerateInput, ParseError, ValidationError
from .linalg import Axis, as_matrix, frobenius_norm_sq, partition, read_matrix_csv
from .matdot import PointStrategy, make_points
from .sampling import Scheme

CSV_FIELDS = [
    "trial",
    "scheme",
    "dist",
    "s",
    "k",
    "completion_time",
    "empirical_norm_err",
    "analytic_expected_norm_err",
    "responders",
]

DEFAULT_TRIALS = 10_000

# Table-1 column order; exact runs get their own column when present
TABLE_COLUMNS = [
    ("independent", "uniform"),
    ("independent", "optimal"),
    ("setwise", "uniform"),
    ("setwise", "optimal"),
    ("exact", "none"),
]


@dataclass(frozen=True)
class SchemeSpec:
    scheme: Scheme
    dist: str
    s: int | None  # None only for the exact scheme before m is known

    @property
    def label(self) -> str:
        return f"{self.scheme.value}:{self.dist}:{self.s}"


@dataclass(frozen=True)
class MatrixSource:
    kind: str = "uniform"  # uniform | normal | files
    half_width: float = 1.0
    path_a: str | None = None
    path_b: str | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    d1: int
    d2: int
    d3: int
    m: int
    schemes: tuple[SchemeSpec, ...]
    workers: int
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    latency: object = field(default_factory=ShiftedExponential)
    matrix: MatrixSource = field(default_factory=MatrixSource)
    points: PointStrategy = PointStrategy.CHEBYSHEV


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    scheme: str
    dist: str
    s: int
    k: int
    responders: tuple[int, ...]
    completion_time: float
    empirical_norm_err: float
    analytic_expected_norm_err: float


# --------------------------------------------------------------------- config


def _parse_lines(text: str, origin: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{origin}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ParseError(f"{origin}:{lineno}: empty key")
        out[key] = value
    return out


def _parse_schemes(value: str) -> list[SchemeSpec]:
    specs = []
    for item in filter(None, (x.strip() for x in value.split(","))):
        parts = item.split(":")
        try:
            scheme = Scheme(parts[0])
        except ValueError:
            raise ValidationError(f"schemes: unknown scheme {parts[0]!r}") from None
        if scheme is Scheme.EXACT:
            if len(parts) != 1:
                raise ValidationError(f"schemes: 'exact' takes no distribution or size, got {item!r}")
            specs.append(SchemeSpec(scheme, "none", None))
            continue
        if len(parts) != 3:
            raise ValidationError(f"schemes: expected scheme:dist:s, got {item!r}")
        dist = parts[1]
        if dist not in ("optimal", "uniform"):
            raise ValidationError(f"schemes: unknown distribution {dist!r} in {item!r}")
        try:
            if "-" in parts[2]:
                lo, hi = (int(x) for x in parts[2].split("-"))
                sizes = range(lo, hi + 1)
            else:
                sizes = [int(parts[2])]
        except ValueError:
            raise ValidationError(f"schemes: bad sample size in {item!r}") from None
        specs.extend(SchemeSpec(scheme, dist, s) for s in sizes)
    if not specs:
        raise ValidationError("schemes: at least one scheme is required")
    return specs


def _latency_from(kv: dict[str, str], n_workers: int):
    kind = kv.get("latency.kind", "shifted_exp")
    try:
        if kind == "shifted_exp":
            return ShiftedExponential(float(kv.get("latency.shift", 1.0)), float(kv.get("latency.rate", 1.0)))
        if kind == "constant":
            return Constant(float(kv.get("latency.value", 1.0)))
        if kind == "deterministic":
            delays = tuple(float(x) for x in kv["latency.delays"].split(","))
            if len(delays) != n_workers:
                raise ValidationError(f"latency.delays: {len(delays)} values for {n_workers} workers")
            return Deterministic(delays)
    except KeyError as exc:
        raise ValidationError(f"{exc.args[0]}: required for latency.kind = {kind}") from None
    except ValueError as exc:
        if isinstance(exc, CodedMMError):
            raise
        raise ValidationError(f"latency: {exc}") from None
    raise ValidationError(f"latency.kind: unknown latency model {kind!r}")


KNOWN_KEYS = {
    "d1", "d2", "d3", "m", "workers", "trials", "seed", "schemes", "points",
    "latency.kind", "latency.shift", "latency.rate", "latency.value", "latency.delays",
    "matrix.source", "matrix.half_width", "matrix.path_a", "matrix.path_b",
}  # fmt: skip


def config_from_dict(kv: dict[str, str], base_dir: str = ".") -> ExperimentConfig:
    unknown = sorted(set(kv) - KNOWN_KEYS)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(unknown)}")

    def get_int(key, default=None):
        if key not in kv:
            if default is None:
                raise ValidationError(f"{key}: required")
            return default
        try:
            return int(kv[key])
        except ValueError:
            raise ValidationError(f"{key}: expected an integer, got {kv[key]!r}") from None

    source = kv.get("matrix.source", "uniform")
    if source not in ("uniform", "normal", "files"):
        raise ValidationError(f"matrix.source: unknown source {source!r}")
    if source == "files":
        try:
            path_a = os.path.join(base_dir, kv["matrix.path_a"])
            path_b = os.path.join(base_dir, kv["matrix.path_b"])
        except KeyError as exc:
            raise ValidationError(f"{exc.args[0]}: required for matrix.source = files") from None
        matrix = MatrixSource("files", path_a=path_a, path_b=path_b)
        a, b = read_matrix_csv(path_a), read_matrix_csv(path_b)
        shape = {"d1": a.shape[0], "d2": a.shape[1], "d3": b.shape[1]}
        if b.shape[0] != a.shape[1]:
            raise ValidationError(f"matrix.path_b: {b.shape[0]} rows, A has {a.shape[1]} columns")
        for key, val in shape.items():
            if key in kv and get_int(key) != val:
                raise ValidationError(f"{key}: config says {kv[key]}, matrix file gives {val}")
        d1, d2, d3 = shape["d1"], shape["d2"], shape["d3"]
    else:
        try:
            half_width = float(kv.get("matrix.half_width", 1.0))
        except ValueError:
            raise ValidationError("matrix.half_width: expected a number") from None
        if not half_width > 0:
            raise ValidationError("matrix.half_width: must be positive")
        matrix = MatrixSource(source, half_width=half_width)
        d1, d2, d3 = get_int("d1"), get_int("d2"), get_int("d3")

    m = get_int("m")
    for key, val in (("d1", d1), ("d2", d2), ("d3", d3), ("m", m)):
        if val < 1:
            raise ValidationError(f"{key}: must be positive, got {val}")
    if d2 % m:
        raise ValidationError(f"m: {m} does not divide d2 = {d2}")

    if "schemes" not in kv:
        raise ValidationError("schemes: required")
    schemes = []
    for spec in _parse_schemes(kv["schemes"]):
        if spec.scheme is Scheme.EXACT:
            spec = replace(spec, s=m)
        if not 1 <= spec.s <= m:
            raise ValidationError(f"schemes: sample size s={spec.s} outside 1..m={m} in {spec.label}")
        schemes.append(spec)

    workers = get_int("workers", 2 * m + 2)
    need = max(recovery_threshold(spec.s) for spec in schemes)
    if workers < need:
        raise ValidationError(f"workers: {workers} < recovery threshold {need} of the largest configured s")
    trials = get_int("trials", DEFAULT_TRIALS)
    if trials < 1:
        raise ValidationError(f"trials: must be >= 1, got {trials}")
    seed = get_int("seed", 0)
    if not 0 <= seed < 2**64:
        raise ValidationError(f"seed: must be a 64-bit unsigned integer, got {seed}")
    try:
        points = PointStrategy(kv.get("points", "chebyshev"))
    except ValueError:
        raise ValidationError(f"points: unknown strategy {kv['points']!r}") from None

    return ExperimentConfig(
        d1=d1,
        d2=d2,
        d3=d3,
        m=m,
        schemes=tuple(schemes),
        workers=workers,
        trials=trials,
        seed=seed,
        latency=_latency_from(kv, workers),
        matrix=matrix,
        points=points,
    )


def parse_config_text(text: str, overrides: dict[str, str] | None = None, origin="<config>", base_dir=".") -> ExperimentConfig:
    kv = _parse_lines(text, origin)
    kv.update(overrides or {})
    return config_from_dict(kv, base_dir)


def parse_config(path, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Read and validate a config file; ``overrides`` win over file values."""
    try:
        with open(path) as f:
            text = f.read()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text, overrides, str(path), os.path.dirname(os.path.abspath(path)))


# ----------------------------------------------------------------- execution


def make_matrices(cfg: ExperimentConfig, rng: np.random.Generator):
    src = cfg.matrix
    if src.kind == "files":
        return read_matrix_csv(src.path_a), read_matrix_csv(src.path_b)
    if src.kind == "normal":
        return rng.standard_normal((cfg.d1, cfg.d2)), rng.standard_normal((cfg.d2, cfg.d3))
    h = src.half_width
    return rng.uniform(-h, h, (cfg.d1, cfg.d2)), rng.uniform(-h, h, (cfg.d2, cfg.d3))


def _threads() -> int:
    try:
        return max(1, int(os.environ["CODEDMM_THREADS"]))
    except (KeyError, ValueError):
        return os.cpu_count() or 1


def run_experiment(cfg: ExperimentConfig, a=None, b=None) -> list[TrialRecord]:
    """Every configured (scheme, dist, s) cell for ``cfg.trials`` rounds.

    One seed stream builds the matrices and each cell gets its own child
    stream, so the output depends only on the config, never on scheduling.
    """
    streams = np.random.SeedSequence(cfg.seed).spawn(1 + len(cfg.schemes))
    if a is None or b is None:
        a, b = make_matrices(cfg, np.random.default_rng(streams[0]))
    a, b = as_matrix(a), as_matrix(b)
    pa = partition(a, cfg.m, Axis.COLUMNS)
    pb = partition(b, cfg.m, Axis.ROWS)
    products = [pa[q] @ pb[q] for q in range(cfg.m)]
    truth = np.sum(products, axis=0)
    frob_sq = frobenius_norm_sq(truth)
    if frob_sq == 0:
        raise DegenerateInput("A @ B = 0; normalized errors are undefined")
    blocks_a, blocks_b = np.stack(pa.blocks), np.stack(pb.blocks)
    pts = make_points(cfg.workers, cfg.points)

    def run_cell(i):
        spec = cfg.schemes[i]
        scheme, s = spec.scheme, spec.s
        try:
            distribution = make_distribution(products, scheme, spec.dist, s)
        except DegenerateInput:
            distribution = None
        analytic = float(analytic_error(products, scheme, distribution, s) / frob_sq)
        rng = np.random.default_rng(streams[i + 1])
        idx, scales = draw_batch(scheme, distribution, s, cfg.m, cfg.trials, rng)
        out = run_rounds(blocks_a, blocks_b, idx, scales, scales, pts, cfg.latency, rng, truth)
        k = recovery_threshold(idx.shape[1])
        return [
            TrialRecord(
                t,
                scheme.value,
                spec.dist,
                s,
                k,
                tuple(int(n) for n in out.responders[t]),
                float(out.completion_time[t]),
                float(out.sq_error[t] / frob_sq),
                analytic,
            )
            for t in range(cfg.trials)
        ]

    n_threads = min(_threads(), len(cfg.schemes))
    if n_threads > 1:
        with ThreadPoolExecutor(n_threads) as pool:
            cells = list(pool.map(run_cell, range(len(cfg.schemes))))
    else:
        cells = [run_cell(i) for i in range(len(cfg.schemes))]
    return [rec for cell in cells for rec in cell]


# -------------------------------------------------------------------- output


def _row(rec: TrialRecord) -> list[str]:
    return [
        str(rec.trial),
        rec.scheme,
        rec.dist,
        str(rec.s),
        str(rec.k),
        repr(float(rec.completion_time)),
        repr(float(rec.empirical_norm_err)),
        repr(float(rec.analytic_expected_norm_err)),
        ";".join(map(str, rec.responders)),
    ]


def emit_csv(records, path) -> None:
    if not records:
        raise ValueError("no records to write")
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        w.writerows(_row(rec) for rec in records)


def read_csv(path) -> list[TrialRecord]:
    records = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != CSV_FIELDS:
            raise ParseError(f"{path}: unexpected header {header}")
        for lineno, row in enumerate(reader, 2):
            try:
                t, scheme, dist, s, k, ct, emp, ana, resp = row
                records.append(
                    TrialRecord(
                        int(t), scheme, dist, int(s), int(k),
                        tuple(int(x) for x in resp.split(";")) if resp else (),
                        float(ct), float(emp), float(ana),
                    )  # fmt: skip
                )
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    return records


@dataclass(frozen=True)
class CellSummary:
    mean: float
    std_error: float
    n: int
    analytic: float


def summarize(records) -> dict[tuple[str, str, int], CellSummary]:
    """Mean and standard error of the normalized error per (scheme, dist, k)."""
    groups = defaultdict(list)
    analytic = {}
    for rec in records:
        key = (rec.scheme, rec.dist, rec.k)
        groups[key].append(rec.empirical_norm_err)
        analytic[key] = rec.analytic_expected_norm_err
    out = {}
    for key, vals in groups.items():
        n = len(vals)
        mean = math.fsum(vals) / n
        sem = math.sqrt(math.fsum((v - mean) ** 2 for v in vals) / (n - 1) / n) if n > 1 else 0.0
        out[key] = CellSummary(mean, sem, n, analytic[key])
    return out


def summarize_table(records) -> str:
    """Table-1-shaped grid: one row per K, one column per (scheme, dist)."""
    if not records:
        raise ValueError("no records to summarize")
    summary = summarize(records)
    cols = [c for c in TABLE_COLUMNS if any(key[:2] == c for key in summary)]
    cols += sorted({key[:2] for key in summary} - set(cols))
    ks = sorted({key[2] for key in summary})
    width = 20
    buf = io.StringIO()
    buf.write("K".ljust(4) + "".join(f"{s}/{d}".rjust(width) for s, d in cols) + "\n")
    for k in ks:
        cells = []
        for col in cols:
            cell = summary.get((*col, k))
            cells.append((f"{cell.mean:.4f} ± {cell.std_error:.4f}" if cell else "-").rjust(width))
        buf.write(f"{k:<4}" + "".join(cells) + "\n")
    return buf.getvalue()


def write_aggregate(records, path) -> None:
    """Whitespace-separated ``k mean sem ...`` columns for gnuplot."""
    summary = summarize(records)
    cols = sorted({key[:2] for key in summary})
    ks = sorted({key[2] for key in summary})
    with open(path, "w") as f:
        f.write("# k " + " ".join(f"{s}_{d}_mean {s}_{d}_sem" for s, d in cols) + "\n")
        for k in ks:
            vals = []
            for col in cols:
                cell = summary.get((*col, k))
                vals += [repr(cell.mean), repr(cell.std_error)] if cell else ["NaN", "NaN"]
            f.write(f"{k} " + " ".join(vals) + "\n")
