"""
Resource sweeps, model fitting and extrapolation.

Oracles are synthesized for seeded random bases of growing dimension with
⌈log₂ n⌉ bits per coefficient; their counts are fitted to polynomial-log
families and extrapolated to cryptographic dimensions.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from svp_oracle import config
from svp_oracle.circuit import ResourceMetrics, metrics
from svp_oracle.errors import FitError, InvalidBasisError, InvalidInputError
from svp_oracle.grover import assemble_grover, dimension_iterations
from svp_oracle.lattice import LatticeBasis
from svp_oracle.oracle import choose_threshold, log_n_encoding, synthesize_oracle
from svp_oracle.reports import metrics_to_dict

logger = logging.getLogger(__name__)


# =============================================================================
# Model Families
# =============================================================================


class Family(str, Enum):
    SPACE = "space"
    TIME = "time"
    COST = "cost"


# (label, term(n, log n))
FAMILY_TERMS = {
    Family.SPACE: (
        ("n^2 log n", lambda n, L: n * n * L),
        ("n log n", lambda n, L: n * L),
        ("log n", lambda n, L: L),
        ("n^2", lambda n, L: n * n),
        ("n", lambda n, L: n),
        ("1", lambda n, L: 1.0),
    ),
    Family.TIME: (
        ("n^2 log^2 n", lambda n, L: n * n * L * L),
        ("n log^2 n", lambda n, L: n * L * L),
        ("n^2 log n", lambda n, L: n * n * L),
        ("n log n", lambda n, L: n * L),
        ("n^2", lambda n, L: n * n),
        ("n", lambda n, L: n),
        ("log^2 n", lambda n, L: L * L),
        ("log n", lambda n, L: L),
        ("1", lambda n, L: 1.0),
    ),
    Family.COST: (
        ("n^3 log^2 n", lambda n, L: n**3 * L * L),
        ("n^2 log^2 n", lambda n, L: n * n * L * L),
        ("n log^2 n", lambda n, L: n * L * L),
        ("n^3 log n", lambda n, L: n**3 * L),
        ("n^2 log n", lambda n, L: n * n * L),
        ("n log n", lambda n, L: n * L),
        ("n^3", lambda n, L: n**3),
        ("n^2", lambda n, L: n * n),
        ("n", lambda n, L: n),
        ("log^2 n", lambda n, L: L * L),
        ("log n", lambda n, L: L),
        ("1", lambda n, L: 1.0),
    ),
}

METRIC_FAMILY = {
    "width": Family.SPACE,
    "depth": Family.TIME,
    "t_depth": Family.TIME,
    "quantum_cost": Family.COST,
    "t_count": Family.COST,
}

# Leading asymptotic term per metric for a single oracle
ASYMPTOTIC_MODELS = {
    "width": lambda n: n * n * math.log2(n),
    "depth": lambda n: n * n * math.log2(n) ** 2,
    "quantum_cost": lambda n: n**3 * math.log2(n) ** 2,
}


# =============================================================================
# Reference Data
# =============================================================================

# Published oracle counts with log n qubits per coefficient
REFERENCE_DIMS = (2, 5, 10, 20, 30, 40, 50)
REFERENCE_ORACLE_COUNTS = {
    "width": (29, 263, 1154, 5165, 11345, 23246, 36056),
    "depth": (344, 3058, 7248, 17352, 23360, 38854, 45440),
    "quantum_cost": (2006, 70996, 467774, 2817236, 6311554, 15910146, 24831782),
    "t_count": (28, 4718, 80858, 542674, 1258752, 3232930, 5097846),
    "t_depth": (62, 736, 1220, 2866, 3932, 6336, 7640),
}

# Published fits as (coefficient, term) pairs; the log base is not stated unambiguously
REFERENCE_FITS = {
    "width": ((3.4, "n^2 log n"), (97.81, "n"), (-999.2, "1")),
    "depth": ((0.34, "n^2 log^2 n"), (4028.29, "log n"), (-5124.38, "1")),
    "quantum_cost": ((2.038, "n^3 log^2 n"), (6.3, "n"), (-2450093.0, "1")),
    "t_count": ((1803.57, "n^2"), (2628.43, "n log n"), (-51449.96, "n"), (281006.36, "1")),
}

_ALL_TERMS = {label: term for terms in FAMILY_TERMS.values() for label, term in terms}


def reference_prediction(metric: str, n: int, log=math.log2) -> float:
    """Published fit for metric evaluated at n with the given logarithm."""
    L = log(n)
    return sum(coef * _ALL_TERMS[label](n, L) for coef, label in REFERENCE_FITS[metric])


def reference_cross_check(n: int) -> dict:
    """Published fits at n under both log-base readings."""
    return {
        metric: {"log2": reference_prediction(metric, n, math.log2), "ln": reference_prediction(metric, n, math.log)}
        for metric in REFERENCE_FITS
    }


# =============================================================================
# Sweeps
# =============================================================================


@dataclass
class SweepPoint:
    n: int
    seed: int
    metrics: ResourceMetrics
    total_input_bits: int
    N: int
    iterations: int
    grover_totals: ResourceMetrics | None = None
    per_iteration: ResourceMetrics | None = None  # oracle then diffusion

    def value(self, metric: str, per_iteration: bool = False) -> int:
        if not per_iteration:
            return getattr(self.metrics, metric)
        if self.per_iteration is None:
            raise FitError(f"Sweep point n={self.n} carries no per-iteration metrics")
        return getattr(self.per_iteration, metric)


def random_basis(n: int, seed: int, entry_range: int = config.SWEEP_ENTRY_RANGE) -> LatticeBasis:
    """Seeded n×n integer basis with entries in [−entry_range, entry_range], resampled until full rank."""
    rng = np.random.default_rng([seed, n])
    attempts = 0
    while True:
        attempts += 1
        rows = rng.integers(-entry_range, entry_range, size=(n, n), endpoint=True)
        try:
            basis = LatticeBasis.from_rows(rows.tolist())
        except InvalidBasisError:
            continue
        logger.debug(f"Random {n}x{n} basis after {attempts} draw(s)")
        return basis


def sweep_point(n: int, seed: int = config.DEFAULT_SEED, grover: bool = True) -> SweepPoint:
    if n < 2:
        raise ValueError(f"Sweep dimensions start at 2, got {n}")
    basis = random_basis(n, seed)
    encoding = log_n_encoding(n)
    oracle = synthesize_oracle(basis, encoding, choose_threshold(basis))
    oracle_metrics = metrics(oracle.circuit)

    _, plan = assemble_grover(oracle, config.DEFAULT_SOLUTION_COUNT, emit=False, oracle_metrics=oracle_metrics)
    logger.info(
        f"Sweep n={n}: width={oracle_metrics.width}, cost={oracle_metrics.quantum_cost}, "
        f"t_count={oracle_metrics.t_count}"
    )
    return SweepPoint(
        n=n,
        seed=seed,
        metrics=oracle_metrics,
        total_input_bits=encoding.total_input_bits,
        N=plan.N,
        iterations=plan.iterations,
        grover_totals=plan.totals if grover else None,
        per_iteration=plan.per_iteration,
    )


def sweep(dims, seed: int = config.DEFAULT_SEED, grover: bool = True, jobs: int = 1) -> list[SweepPoint]:
    """Sweep points for ascending dims; independent points run in a process pool when jobs > 1."""
    dims = list(dims)
    if dims != sorted(dims):
        raise ValueError(f"Sweep dimensions must be ascending, got {dims}")

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(sweep_point, dims, [seed] * len(dims), [grover] * len(dims)))
    return [sweep_point(n, seed, grover) for n in dims]


# =============================================================================
# Fitting
# =============================================================================


@dataclass
class FitModel:
    family: Family
    metric: str
    coefficients: tuple[float, ...]
    r_squared: float
    max_relative_error: float
    n_min: int
    n_max: int
    per_iteration: bool = False  # fitted to oracle plus diffusion counts

    @property
    def terms(self) -> list[str]:
        return [label for label, _ in FAMILY_TERMS[self.family]]

    @property
    def poor(self) -> bool:
        return self.max_relative_error > config.FIT_RELATIVE_TOLERANCE

    def predict(self, n: float) -> float:
        row = _design_row(self.family, n)
        return float(np.dot(row, self.coefficients))

    @classmethod
    def from_report(cls, report: dict) -> "FitModel":
        family = Family(report["family"])
        labels = [label for label, _ in FAMILY_TERMS[family]]
        return cls(
            family=family,
            metric=report["metric"],
            coefficients=tuple(float(report["coefficients"][label]) for label in labels),
            r_squared=report["r_squared"],
            max_relative_error=report["max_relative_error"],
            n_min=report["n_range"][0],
            n_max=report["n_range"][1],
            per_iteration=report.get("per_iteration", False),
        )


def _design_row(family: Family, n: float) -> np.ndarray:
    L = math.log2(n)
    return np.array([term(n, L) for _, term in FAMILY_TERMS[family]], dtype=float)


def fit(ns, values, family: Family, metric: str = "") -> FitModel:
    """Least-squares fit of values(n) in one family; columns are scaled before solving."""
    family = Family(family)
    ns = [int(n) for n in ns]
    y = np.asarray(values, dtype=float)
    count = len(FAMILY_TERMS[family])
    if len(ns) < count:
        raise FitError(f"{family.value} family needs {count} points, got {len(ns)}")

    X = np.vstack([_design_row(family, n) for n in ns])
    scale = np.abs(X).max(axis=0)
    coef_scaled, _, rank, _ = np.linalg.lstsq(X / scale, y, rcond=None)
    if rank < count:
        raise FitError(f"Design matrix for the {family.value} family is rank deficient ({rank} < {count})")
    coefficients = coef_scaled / scale

    predicted = X @ coefficients
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    max_rel = float(np.max(np.abs(predicted - y) / np.maximum(np.abs(y), 1e-300)))

    model = FitModel(
        family=family,
        metric=metric,
        coefficients=tuple(float(c) for c in coefficients),
        r_squared=r_squared,
        max_relative_error=max_rel,
        n_min=min(ns),
        n_max=max(ns),
    )
    if model.poor:
        logger.warning(f"Poor {family.value} fit for {metric or 'data'}: max relative error {max_rel:.2%}")
    return model


def fit_metric(points: list[SweepPoint], metric: str, per_iteration: bool = False) -> FitModel:
    """Fit oracle counts, or with per_iteration the counts of one oracle plus diffusion."""
    values = [p.value(metric, per_iteration) for p in points]
    model = fit([p.n for p in points], values, METRIC_FAMILY[metric], metric)
    model.per_iteration = per_iteration
    return model


def loglog_slope(ns, values) -> float:
    """Slope of log(value) against log(n); two points give the exact two-point slope."""
    result = stats.linregress(np.log(np.asarray(ns, dtype=float)), np.log(np.asarray(values, dtype=float)))
    return float(result.slope)


def asymptotic_slope(metric: str, n1: int, n2: int) -> float:
    model = ASYMPTOTIC_MODELS[metric]
    return loglog_slope([n1, n2], [model(n1), model(n2)])


# =============================================================================
# Extrapolation
# =============================================================================


@dataclass
class Extrapolation:
    """Predictions at one target n; Grover totals leave out the one-time preparation layer."""

    n: int
    metric: str
    oracle_value: float
    iterations: int
    per_iteration_value: float | None = None

    @property
    def grover_total(self) -> int | None:
        """Rounded per-iteration prediction times k, as an exact integer; width is not repeated."""
        if self.per_iteration_value is None:
            return None
        per_iteration = round(self.per_iteration_value)
        return per_iteration if self.metric == "width" else per_iteration * self.iterations

    @property
    def log2_grover_total(self) -> float | None:
        if self.per_iteration_value is None:
            return None
        log2_value = math.log2(max(self.per_iteration_value, 1.0))
        return log2_value if self.metric == "width" else log2_value + math.log2(self.iterations)


def extrapolate(
    model: FitModel,
    n: int,
    M: int = config.DEFAULT_SOLUTION_COUNT,
    per_iteration: FitModel | None = None,
) -> Extrapolation:
    """Evaluate an oracle fit at n, and a per-iteration fit for the Grover totals."""
    floor = max(model.n_max, per_iteration.n_max if per_iteration is not None else 0)
    if n < floor:
        raise InvalidInputError(f"Extrapolation targets start at the largest sweep dimension {floor}, got {n}")
    if per_iteration is not None and not per_iteration.per_iteration:
        raise InvalidInputError(f"Fit for {per_iteration.metric} is not a per-iteration fit")
    return Extrapolation(
        n=n,
        metric=model.metric,
        oracle_value=model.predict(n),
        iterations=dimension_iterations(n, M),
        per_iteration_value=per_iteration.predict(n) if per_iteration is not None else None,
    )


# =============================================================================
# Reports
# =============================================================================


def sweep_report(points: list[SweepPoint]) -> dict:
    return {
        "seed": points[0].seed if points else None,
        "entry_range": config.SWEEP_ENTRY_RANGE,
        "points": [
            {
                "n": p.n,
                "total_input_bits": p.total_input_bits,
                "N": str(p.N),
                "k": str(p.iterations),
                "metrics": metrics_to_dict(p.metrics),
                "grover_totals": metrics_to_dict(p.grover_totals) if p.grover_totals else None,
                "per_iteration": metrics_to_dict(p.per_iteration) if p.per_iteration else None,
            }
            for p in points
        ],
    }


def points_from_report(report: dict) -> list[SweepPoint]:
    """Rebuild sweep points from a saved sweep report."""
    points = []
    for p in report["points"]:
        totals = p.get("grover_totals")
        per_iteration = p.get("per_iteration")
        points.append(
            SweepPoint(
                n=p["n"],
                seed=report["seed"],
                metrics=ResourceMetrics(**p["metrics"]),
                total_input_bits=p["total_input_bits"],
                N=int(p["N"]),
                iterations=int(p["k"]),
                grover_totals=ResourceMetrics(**totals) if totals else None,
                per_iteration=ResourceMetrics(**per_iteration) if per_iteration else None,
            )
        )
    return points


def fit_report(model: FitModel) -> dict:
    return {
        "metric": model.metric,
        "family": model.family.value,
        "coefficients": dict(zip(model.terms, model.coefficients)),
        "r_squared": model.r_squared,
        "max_relative_error": model.max_relative_error,
        "poor_fit": model.poor,
        "n_range": [model.n_min, model.n_max],
        "per_iteration": model.per_iteration,
    }


def extrapolation_report(result: Extrapolation) -> dict:
    return {
        "n": result.n,
        "metric": result.metric,
        "oracle": result.oracle_value,
        "per_iteration": result.per_iteration_value,
        "k": str(result.iterations),
        "grover_total": str(result.grover_total) if result.grover_total is not None else None,
        "log2_grover_total": result.log2_grover_total,
        "reference": reference_cross_check(result.n).get(result.metric),
    }
