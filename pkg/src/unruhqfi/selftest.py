"""Fast invariant checks behind ``unruhqfi selftest``."""
from __future__ import annotations

import math

import numpy as np

from . import fock, qfi
from .fock import NoonSpec
from .study import RunConfig


def _noiseless(config):
    worst = 0.0
    for enc in ("single", "dual"):
        for n in range(1, 11):
            out = qfi.qfi_converged(NoonSpec(enc, n, config.theta), 0.0, config.precision)
            worst = max(worst, abs(out.value - n * n))
    return worst < 1e-6, f"max |F - N^2| at r=0 = {worst:.2e}"


def _lyapunov(config, rng):
    worst = 0.0
    for _ in range(20):
        spec, r, dim = _random_small(rng)
        rho = fock.rob_state(spec, r, dim)
        drho = fock.rob_state_derivative(spec, r, dim)
        worst = max(worst, abs(qfi.qfi_from_state(rho, drho) - qfi.qfi_lyapunov(rho, drho)))
    return worst < 1e-8, f"max deviation from Lyapunov solve = {worst:.2e}"


def _random_small(rng):
    if rng.random() < 0.75:
        n = int(rng.integers(1, 5))
        spec = NoonSpec("single", n, rng.uniform(0, 2 * math.pi))
        dim = int(rng.integers(n + 1, 9))
    else:
        spec = NoonSpec("dual", 1, rng.uniform(0, 2 * math.pi))
        dim = 2
    return spec, float(rng.uniform(0.05, 1.5)), dim


def _derivative(config, rng, h=1e-5):
    worst = 0.0
    for _ in range(10):
        enc = "single" if rng.random() < 0.7 else "dual"
        n = int(rng.integers(1, 4))
        dim = int(rng.integers(n + 1, 41)) if enc == "single" else int(rng.integers(n + 1, 7))
        theta, r = rng.uniform(0, 2 * math.pi), rng.uniform(0, 1.5)
        exact = fock.rob_state_derivative(NoonSpec(enc, n, theta), r, dim)
        fd = (fock.rob_state(NoonSpec(enc, n, theta + h), r, dim) - fock.rob_state(NoonSpec(enc, n, theta - h), r, dim)) / (2 * h)
        worst = max(worst, float(np.abs(exact - fd).max()))
    return worst < 1e-8, f"max entrywise finite-difference error = {worst:.2e}"


def _blocks(config, rng):
    worst = 0.0
    cases = [("single", n, r, 40) for n in (1, 2, 3) for r in (0.3, 1.0)] + [("dual", 1, r, 15) for r in (0.4, 0.8)]
    for enc, n, r, dim in cases:
        spec = NoonSpec(enc, n, config.theta)
        worst = max(worst, abs(qfi.qfi_at_dim(spec, r, dim) - qfi.qfi_at_dim(spec, r, dim, blocks=False)))
    return worst < 1e-9, f"max |block - dense| = {worst:.2e}"


def _theta(config):
    spreads = [
        qfi.theta_spread(NoonSpec("single", 2), 0.5, [0, 0.3, 1.0, 2.5], config.precision),
        qfi.theta_spread(NoonSpec("dual", 1), 0.8, [0, 0.3, 1.0, 2.5], config.precision),
    ]
    return max(spreads) < 1e-6, f"largest spread over theta = {max(spreads):.2e}"


def run_all(config: RunConfig | None = None, seed: int = 7):
    config = config or RunConfig()
    rng = np.random.default_rng(seed)
    checks = [
        ("noiseless law", lambda: _noiseless(config)),
        ("lyapunov oracle", lambda: _lyapunov(config, rng)),
        ("analytic derivative", lambda: _derivative(config, rng)),
        ("block path", lambda: _blocks(config, rng)),
        ("theta independence", lambda: _theta(config)),
    ]
    results = []
    for name, check in checks:
        try:
            ok, detail = check()
        except Exception as exc:  # report, keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
