"""Parameter studies: QFI against N and r, optimal N, decay fits."""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .cache import NullCache, ResultCache
from .errors import (
    ConvergenceError,
    DivergentOptimumError,
    InsufficientDataError,
    ScanCapError,
    UnboundedUncertaintyError,
)
from .fock import Encoding, NoonSpec
from .qfi import DEFAULT_PRECISION, SCHEDULES, qfi_converged
from .records import SweepPoint

logger = logging.getLogger(__name__)

# dual-rail study range; larger N or r needs very large cutoffs
DUAL_MAX_N = 8
DUAL_MAX_R = 1.6


@dataclass(frozen=True)
class RunConfig:
    precision: float = DEFAULT_PRECISION
    theta: float = 0.4
    dim_cap: int | None = None
    schedule_mode: str = "accelerated"
    cache_path: str | None = None
    workers: int = 1
    output: str = "csv"

    def __post_init__(self):
        if not self.precision > 0:
            raise ValueError("precision must be positive")
        if self.dim_cap is not None and self.dim_cap < 2:
            raise ValueError("dim_cap must be >= 2")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.schedule_mode not in SCHEDULES:
            raise ValueError(f"schedule_mode must be one of {SCHEDULES}")
        if self.output not in ("csv", "json"):
            raise ValueError("output must be csv or json")

    def cache(self):
        return ResultCache(self.cache_path) if self.cache_path else NullCache()


@dataclass(frozen=True)
class OptimalN:
    r: float
    n_star: int
    f_star: float
    scan_upper: int
    encoding: Encoding = Encoding.SINGLE


@dataclass(frozen=True)
class FitResult:
    r: float
    a_coeff: float
    b_coeff: float
    residual_sum: float
    n_range: tuple[int, int]
    r_squared: float = 1.0

    def predict(self, n):
        n = np.asarray(n, dtype=float)
        return n**2 * np.exp(-self.a_coeff * n + self.b_coeff)

    def to_row(self):
        from .records import fmt

        return {
            "r": fmt(float(self.r)),
            "a_coeff": fmt(float(self.a_coeff)),
            "b_coeff": fmt(float(self.b_coeff)),
            "residual_sum": fmt(float(self.residual_sum)),
            "n_min": fmt(self.n_range[0]),
            "n_max": fmt(self.n_range[1]),
        }


@dataclass(frozen=True)
class SlopeResult:
    gradient: float
    stderr: float
    r_window: tuple[float, float]
    n_fits: int = 0


def _resolve(config, precision):
    config = config or RunConfig()
    if precision is not None:
        config = replace(config, precision=precision)
    return config


def compute_point(encoding, n, r, config: RunConfig) -> SweepPoint:
    """One converged QFI value; convergence failures come back flagged, not raised."""
    spec = NoonSpec(encoding, n, config.theta)
    t0 = time.perf_counter()
    try:
        out = qfi_converged(
            spec, r, config.precision, schedule=config.schedule_mode, dim_cap=config.dim_cap
        )
        value, dim, ok = out.value, out.dim_used, True
    except ConvergenceError as exc:
        dim, value = exc.history[-1] if exc.history else (0, float("nan"))
        ok = False
    return SweepPoint(spec.encoding, spec.n, float(r), value, dim, ok, time.perf_counter() - t0, spec.theta, config.precision)


def _point_task(args):
    encoding, n, r, config = args
    return compute_point(encoding, n, r, config)


def run_points(tasks, config: RunConfig) -> list[SweepPoint]:
    """Evaluate ``(encoding, n, r)`` tasks through the cache, in input order."""
    cache = config.cache()
    results: list[SweepPoint | None] = []
    todo = []
    for i, (enc, n, r) in enumerate(tasks):
        key = (Encoding(enc).value, int(n), float(r), config.precision, config.schedule_mode, config.theta)
        hit = cache.get(key)
        results.append(hit)
        if hit is None:
            todo.append((i, (Encoding(enc), int(n), float(r), config)))
    if todo:
        args = [t for _, t in todo]
        if config.workers > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                computed = list(pool.map(_point_task, args))
        else:
            computed = [_point_task(a) for a in args]
        seen = set()
        for (i, _), point in zip(todo, computed):
            results[i] = point
            key = point.key(config.schedule_mode)
            # failed points are not cached so a larger cap can retry them
            if point.converged and key not in seen:
                cache.put(point, config.schedule_mode)
                seen.add(key)
    return results


def sweep_over_n(encoding, r, n_list, precision=None, config: RunConfig | None = None) -> list[SweepPoint]:
    """Converged QFI for each N at fixed squeezing ``r``."""
    config = _resolve(config, precision)
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ValueError("n_list is empty")
    if n_list != sorted(n_list):
        raise ValueError("n_list must be ascending")
    return run_points([(encoding, n, r) for n in n_list], config)


def sweep_over_r(encoding, n, r_list, precision=None, config: RunConfig | None = None) -> list[SweepPoint]:
    """Converged QFI for each r at fixed N."""
    config = _resolve(config, precision)
    r_list = [float(r) for r in r_list]
    if not r_list:
        raise ValueError("r_list is empty")
    if r_list != sorted(r_list) or r_list[0] < 0:
        raise ValueError("r_list must be ascending and nonnegative")
    return run_points([(encoding, n, r) for r in r_list], config)


def optimal_n(
    encoding, r, precision=None, config: RunConfig | None = None, n_cap: int = 200, patience: int = 3
) -> OptimalN:
    """Scan N = 1, 2, ... until the QFI has fallen ``patience`` times in a row past its maximum."""
    config = _resolve(config, precision)
    r = float(r)
    if r == 0:
        raise DivergentOptimumError("optimal N diverges at r = 0 (F = N^2 grows without bound)")
    if r < 0:
        raise ValueError("r must be positive")
    batch = max(1, config.workers)
    values: list[float] = []
    best_n, best_f, falls = 0, -math.inf, 0
    n = 0
    while n < n_cap:
        ns = list(range(n + 1, min(n + batch, n_cap) + 1))
        for point in run_points([(encoding, k, r) for k in ns], config):
            n += 1
            if not point.converged:
                raise ConvergenceError(f"QFI at N={point.n}, r={r:g} did not converge")
            values.append(point.qfi)
            if point.qfi > best_f:
                best_n, best_f = point.n, point.qfi
            falls = falls + 1 if len(values) > 1 and values[-1] < values[-2] else 0
            if falls >= patience and n - best_n >= patience:
                return OptimalN(r, best_n, best_f, n, Encoding(encoding))
    raise ScanCapError(f"no confirmed maximum below N={n_cap} at r={r:g}", list(enumerate(values, 1)))


def fit_decay(points, n_min: int | None = None) -> FitResult:
    """Least-squares fit of ``F = N^2 exp(-a N + b)`` on the decaying tail.

    Linear in log space: ``ln(F / N^2) = -a N + b``.  ``n_min`` defaults to
    one past the largest QFI among ``points``.
    """
    points = list(points)
    if not points:
        raise InsufficientDataError("no points to fit")
    rs = {float(p.r) for p in points}
    if len(rs) != 1:
        raise ValueError(f"points span several r values: {sorted(rs)}")
    if n_min is None:
        n_min = max(points, key=lambda p: (p.qfi, -p.n)).n + 1
    use = sorted((p for p in points if p.n >= n_min and p.qfi > 0), key=lambda p: p.n)
    if len(use) < 3:
        raise InsufficientDataError(f"need >= 3 points with N >= {n_min}, have {len(use)}")
    n = np.array([p.n for p in use], dtype=float)
    y = np.log(np.array([p.qfi for p in use]) / n**2)
    design = np.column_stack([n, np.ones_like(n)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ np.array([slope, intercept])
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return FitResult(rs.pop(), float(-slope), float(intercept), ss_res, (int(n[0]), int(n[-1])), r2)


def slope_of_a(fits, r_lo: float, r_hi: float) -> SlopeResult:
    """Gradient of the decay rate ``a(r)`` over ``r_lo <= r <= r_hi``."""
    sel = sorted((f for f in fits if r_lo <= f.r <= r_hi), key=lambda f: f.r)
    if len(sel) < 3:
        raise InsufficientDataError(f"need >= 3 fits in [{r_lo}, {r_hi}], have {len(sel)}")
    res = stats.linregress([f.r for f in sel], [f.a_coeff for f in sel])
    return SlopeResult(float(res.slope), float(res.stderr), (float(r_lo), float(r_hi)), len(sel))


def cramer_rao_bound(qfi: float, num_measurements: int = 1) -> float:
    """Smallest phase uncertainty ``1 / sqrt(M F)`` allowed by the Cramer-Rao bound."""
    if num_measurements < 1 or int(num_measurements) != num_measurements:
        raise ValueError("num_measurements must be a positive integer")
    if qfi < 0 or math.isnan(qfi):
        raise ValueError(f"Fisher information must be nonnegative, got {qfi!r}")
    if qfi == 0:
        raise UnboundedUncertaintyError("zero Fisher information gives no finite bound")
    return 1.0 / math.sqrt(num_measurements * qfi)


def tail_fit(encoding, r, precision=None, config: RunConfig | None = None, span: int = 3) -> FitResult:
    """Locate the optimum, sweep N up to ``span * n_star`` and fit the tail past it."""
    config = _resolve(config, precision)
    best = optimal_n(encoding, r, config=config)
    n_max = max(best.scan_upper, span * best.n_star)
    points = sweep_over_n(encoding, r, range(1, n_max + 1), config=config)
    return fit_decay([p for p in points if p.converged], best.n_star + 1)
