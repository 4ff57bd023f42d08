import math

import numpy as np
import pytest

from unruhqfi import study
from unruhqfi.errors import DivergentOptimumError, InsufficientDataError, ScanCapError, UnboundedUncertaintyError
from unruhqfi.fock import Encoding
from unruhqfi.records import SweepPoint
from unruhqfi.study import FitResult, RunConfig


def synthetic(r, a, b, ns):
    return [SweepPoint(Encoding.SINGLE, n, r, n * n * math.exp(-a * n + b), 10, True, 0.0) for n in ns]


def test_sweep_n_noiseless():
    pts = study.sweep_over_n("single", 0.0, range(1, 11))
    assert [p.qfi for p in pts] == pytest.approx([n * n for n in range(1, 11)], abs=1e-9)
    assert all(p.converged for p in pts)


def test_sweep_n_decays_past_peak():
    pts = study.sweep_over_n("single", 1.0, range(1, 16))
    q = [p.qfi for p in pts]
    peak = int(np.argmax(q))
    assert peak < len(q) - 3
    assert all(b < a for a, b in zip(q[peak:], q[peak + 1 :]))


def test_single_beats_dual():
    s = study.sweep_over_n("single", 0.5, [2, 3])
    d = study.sweep_over_n("dual", 0.5, [2, 3])
    assert all(a.qfi > b.qfi for a, b in zip(s, d))


def test_sweep_r():
    assert [p.qfi for p in study.sweep_over_r("single", 1, [0.0])] == pytest.approx([1.0])
    q = [p.qfi for p in study.sweep_over_r("single", 3, [0, 0.3, 0.6, 0.9, 1.2])]
    assert all(b < a for a, b in zip(q, q[1:]))
    assert study.sweep_over_r("single", 21, [0.0])[0].qfi == pytest.approx(441)


def test_sweep_validation():
    with pytest.raises(ValueError):
        study.sweep_over_n("single", 0.3, [])
    with pytest.raises(ValueError):
        study.sweep_over_n("single", 0.3, [3, 1])
    with pytest.raises(ValueError):
        study.sweep_over_r("single", 1, [0.5, 0.1])


def test_sweep_records_failure():
    (pt,) = study.sweep_over_n("single", 2.0, [3], config=RunConfig(dim_cap=20))
    assert not pt.converged and pt.dim_used == 20


def test_optimal_n_large_r():
    best = study.optimal_n("single", 3.0)
    assert 1 <= best.n_star <= 10
    assert best.scan_upper >= best.n_star + 3


def test_optimal_n_matches_exhaustive_scan():
    best = study.optimal_n("single", 1.0)
    q = [p.qfi for p in study.sweep_over_n("single", 1.0, range(1, 101))]
    assert best.n_star == int(np.argmax(q)) + 1
    assert best.f_star == q[best.n_star - 1]


def test_optimal_n_trend():
    ns = [study.optimal_n("single", r).n_star for r in (0.5, 0.8, 1.5)]
    assert ns == sorted(ns, reverse=True)


def test_optimal_n_errors():
    with pytest.raises(DivergentOptimumError):
        study.optimal_n("single", 0.0)
    with pytest.raises(ScanCapError) as info:
        study.optimal_n("single", 0.6, n_cap=5)
    assert len(info.value.partial) == 5


def test_fit_exact_recovery():
    fit = study.fit_decay(synthetic(1.0, 0.5, 0.2, range(4, 20)), n_min=4)
    assert fit.a_coeff == pytest.approx(0.5, abs=1e-10)
    assert fit.b_coeff == pytest.approx(0.2, abs=1e-10)
    assert fit.residual_sum < 1e-20
    assert fit.n_range == (4, 19)
    assert np.all(fit.predict(np.arange(4, 20)) > 0)


def test_fit_noiseless_data():
    fit = study.fit_decay(synthetic(0.0, 0.0, 0.0, range(1, 8)), n_min=1)
    assert abs(fit.a_coeff) < 1e-10 and abs(fit.b_coeff) < 1e-10


def test_fit_default_tail_starts_past_peak():
    pts = synthetic(1.0, 0.5, 0.2, range(1, 15))  # peak of N^2 e^{-N/2} at N = 4
    assert study.fit_decay(pts).n_range == (5, 14)


def test_fit_errors():
    with pytest.raises(InsufficientDataError):
        study.fit_decay(synthetic(1.0, 0.5, 0.0, [5, 6]), n_min=1)
    with pytest.raises(ValueError):
        study.fit_decay(synthetic(1.0, 0.5, 0, [5, 6]) + synthetic(2.0, 0.5, 0, [5, 6]), n_min=1)


def test_fit_computed_tail():
    pts = study.sweep_over_n("single", 2.5, range(1, 16), config=RunConfig(dim_cap=20000))
    fit = study.fit_decay(pts)
    assert fit.n_range[0] == 6
    assert fit.r_squared > 0.99


def test_slope_recovery():
    fits = [FitResult(r, 0.0416 * r + 0.3, 0.0, 0.0, (1, 5)) for r in np.linspace(2.1, 3.1, 6)]
    s = study.slope_of_a(fits, 2.08, 3.10)
    assert s.gradient == pytest.approx(0.0416, abs=1e-12)
    assert s.stderr < 1e-12
    assert s.n_fits == 6


def test_slope_needs_three_fits():
    fits = [FitResult(r, r, 0.0, 0.0, (1, 5)) for r in (2.2, 2.5)]
    with pytest.raises(InsufficientDataError):
        study.slope_of_a(fits, 2.0, 3.0)


def test_cramer_rao():
    assert study.cramer_rao_bound(25, 1) == pytest.approx(1 / 5)
    assert study.cramer_rao_bound(1, 16) == pytest.approx(1 / 4)
    assert study.cramer_rao_bound(4, 1) == 0.5
    with pytest.raises(UnboundedUncertaintyError):
        study.cramer_rao_bound(0.0)
    with pytest.raises(ValueError):
        study.cramer_rao_bound(1.0, 0)


def test_cache_transparency(tmp_path):
    cached = RunConfig(cache_path=str(tmp_path / "c.csv"))
    plain = study.sweep_over_n("single", 0.7, [1, 2, 3])
    first = study.sweep_over_n("single", 0.7, [1, 2, 3], config=cached)
    again = study.sweep_over_n("single", 0.7, [1, 2, 3], config=cached)
    assert [p.qfi for p in plain] == [p.qfi for p in first]
    assert first == again


def test_precision_and_schedule_do_not_alias(tmp_path):
    path = str(tmp_path / "c.csv")
    a = study.sweep_over_n("single", 0.7, [2], config=RunConfig(cache_path=path))[0]
    b = study.sweep_over_n("single", 0.7, [2], config=RunConfig(cache_path=path, precision=1e-7))[0]
    c = study.sweep_over_n("single", 0.7, [2], config=RunConfig(cache_path=path, schedule_mode="unit-step"))[0]
    assert b.precision == 1e-7 and c.dim_used != a.dim_used


def test_workers_match_serial():
    serial = study.sweep_over_n("single", 0.9, [1, 2, 3, 4])
    pooled = study.sweep_over_n("single", 0.9, [1, 2, 3, 4], config=RunConfig(workers=2))
    assert [p.qfi for p in serial] == [p.qfi for p in pooled]


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(precision=0)
    with pytest.raises(ValueError):
        RunConfig(workers=0)
    with pytest.raises(ValueError):
        RunConfig(dim_cap=1)
    with pytest.raises(ValueError):
        RunConfig(schedule_mode="fast")
