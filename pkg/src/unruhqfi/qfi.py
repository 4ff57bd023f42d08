"""Quantum Fisher information of Rob's state.

The QFI is ``F = Tr[rho' L(rho')]`` where the symmetric logarithmic
derivative is taken in the eigenbasis of ``rho``:

    L(B)_jk = 2 B_jk / (p_j + p_k).

The dense route follows that recipe literally.  The block route exploits the
tridiagonal chains from :func:`unruhqfi.fock.state_chains`; a diagonal phase
gauge makes every chain real, so each one is diagonalized with a real
tridiagonal solver.  Both routes must agree.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import fock
from .errors import ConvergenceError, InvalidStateError
from .fock import Encoding, NoonSpec

logger = logging.getLogger(__name__)

PSD_TOL = 1e-12
NULL_TOL = 1e-12
DEFAULT_PRECISION = 1e-5
START_HEADROOM = 6
DIM_CAP = {Encoding.SINGLE: 4096, Encoding.DUAL: 200}
# converged cutoffs must also hold all but this multiple of `precision` of the trace
TRACE_SLACK = 10.0
SCHEDULES = ("accelerated", "unit-step")


@dataclass
class Spectrum:
    """Eigenvalues (descending, clamped at 0) and column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def source_dim(self) -> int:
        return len(self.eigenvalues)


def _clamp(values, scale, tol=PSD_TOL):
    floor = -tol * scale
    low = values.min(initial=0.0)
    if low < floor:
        raise InvalidStateError(f"eigenvalue {low:.3e} below -{tol:g} x largest ({scale:.3e})")
    return np.where(values < 0, 0.0, values)


def eigh(m: np.ndarray, tol: float = PSD_TOL) -> Spectrum:
    """Step (i): full Hermitian eigendecomposition, with PSD validation."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    w, v = sla.eigh(m)
    w, v = w[::-1], v[:, ::-1]
    scale = max(abs(w[0]), abs(w[-1])) if len(w) else 0.0
    return Spectrum(_clamp(w, scale, tol), v)


def to_eigenbasis(spectrum: Spectrum, b: np.ndarray) -> np.ndarray:
    """Step (iii): express ``b`` in the eigenbasis of rho."""
    b = np.asarray(b)
    if b.shape != (spectrum.source_dim,) * 2:
        raise ValueError(f"operator shape {b.shape} does not match spectrum of size {spectrum.source_dim}")
    v = spectrum.eigenvectors
    return v.conj().T @ b @ v


def _inverse_pair_sums(p, floor):
    s = p[:, None] + p[None, :]
    keep = s > floor
    out = np.zeros_like(s)
    out[keep] = 2.0 / s[keep]
    return out


def sld_lower(spectrum: Spectrum, b: np.ndarray, null_floor: float | None = None) -> np.ndarray:
    """Step (iv): the SLD map applied to ``b``, returned in the eigenbasis.

    ``b`` is given in the original basis.  Pairs with ``p_j + p_k`` at or
    below ``null_floor`` (default ``1e-12`` x largest eigenvalue) carry no
    information and are dropped.
    """
    bt = to_eigenbasis(spectrum, b)
    p = spectrum.eigenvalues
    if null_floor is None:
        null_floor = NULL_TOL * (p[0] if len(p) else 0.0)
    return _inverse_pair_sums(p, null_floor) * bt


def qfi_from_state(rho: np.ndarray, drho: np.ndarray) -> float:
    """QFI of a generic density matrix and its derivative, steps (i)-(v)."""
    spectrum = eigh(rho)
    bt = to_eigenbasis(spectrum, drho)
    lowered = sld_lower(spectrum, drho)
    # Tr[B L] without forming the product
    return max(float(np.sum(bt.T * lowered).real), 0.0)


def qfi_lyapunov(rho: np.ndarray, drho: np.ndarray) -> float:
    """QFI from a direct linear solve of ``rho L + L rho = 2 rho'``.

    Independent of any eigendecomposition; intended for small matrices
    (the Kronecker system has ``dim**4`` entries).
    """
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    eye = np.eye(d)
    # column-major vec: vec(A X B) = (B^T kron A) vec(X)
    op = np.kron(eye, rho) + np.kron(rho.T, eye)
    rhs = 2.0 * np.asarray(drho, dtype=complex).reshape(-1, order="F")
    sol, *_ = np.linalg.lstsq(op, rhs, rcond=None)
    sld = sol.reshape(d, d, order="F")
    return float(np.trace(drho @ sld).real)


def _chain_qfi(chains, phase, dphase):
    spectra = []
    top = 0.0
    for ch in chains:
        if len(ch.diag) == 1:
            top = max(top, ch.diag[0])
            continue
        w, v = sla.eigh_tridiagonal(ch.diag, ch.coh)
        spectra.append((ch.coh, w, v))
        top = max(top, w[-1])
    # gauge rotation diag(phase**t) turns rho real and rho' into s * (E - E^T)
    s = abs(np.conj(phase) * dphase)
    floor = NULL_TOL * top
    total = 0.0
    low = 0.0
    for coh, w, v in spectra:
        low = min(low, w[0])
        ev = np.zeros_like(v)
        ev[1:] = coh[:, None] * v[:-1]
        ev[:-1] -= coh[:, None] * v[1:]
        m = v.T @ ev
        ww = np.where(w < 0, 0.0, w)
        total += float(np.sum(_inverse_pair_sums(ww, floor) * m * m))
    if low < -PSD_TOL * top:
        raise InvalidStateError(f"eigenvalue {low:.3e} below -{PSD_TOL:g} x largest ({top:.3e})")
    return s * s * total


def qfi_at_dim(spec: NoonSpec, r: float, dim: int, blocks: bool = True) -> float:
    """QFI of Rob's state truncated at ``dim`` levels (per mode for dual rail)."""
    if blocks:
        chains, phase, dphase = fock.state_chains(spec, r, dim)
        return max(_chain_qfi(chains, phase, dphase), 0.0)
    rho = fock.rob_state(spec, r, dim)
    drho = fock.rob_state_derivative(spec, r, dim)
    return qfi_from_state(rho, drho)


def state_trace(spec: NoonSpec, r: float, dim: int) -> float:
    chains, _, _ = fock.state_chains(spec, r, dim)
    return float(sum(ch.diag.sum() for ch in chains))


@dataclass
class QfiOutcome:
    value: float
    dim_used: int
    history: list[tuple[int, float]] = field(default_factory=list)
    converged: bool = True
    precision: float = DEFAULT_PRECISION
    trace: float = 1.0

    @property
    def trace_deficit(self) -> float:
        return 1.0 - self.trace


def start_dim(n: int, r: float) -> int:
    """Initial cutoff: N plus a few mean thermal occupations of headroom."""
    return n + math.ceil(START_HEADROOM * (math.sinh(r) ** 2 + 1.0))


def dimension_schedule(start: int, cap: int, schedule: str = "accelerated"):
    if schedule not in SCHEDULES:
        raise ValueError(f"unknown schedule {schedule!r}; expected one of {SCHEDULES}")
    step = 1 if schedule == "unit-step" else max(8, math.ceil(0.25 * start))
    k = min(start, cap)
    while True:
        yield k
        if k >= cap:
            return
        k = min(k + step, cap)


def qfi_converged(
    spec: NoonSpec,
    r: float,
    precision: float = DEFAULT_PRECISION,
    *,
    schedule: str = "accelerated",
    dim_cap: int | None = None,
    dim0: int | None = None,
    blocks: bool = True,
) -> QfiOutcome:
    """Grow the cutoff until two successive QFI values differ by < ``precision``.

    The cutoff must also keep the trace deficit below
    ``TRACE_SLACK * precision``; the QFI often settles before the tail of the
    N-photon branch is captured.

    Raises :class:`ConvergenceError` (carrying the history) if ``dim_cap`` is
    reached first.
    """
    if not precision > 0:
        raise ValueError("precision must be positive")
    r = fock.check_squeezing(r)
    cap = dim_cap if dim_cap is not None else DIM_CAP[spec.encoding]
    if cap <= spec.n:
        raise ValueError(f"dim_cap {cap} cannot hold {spec.n} excitations")
    start = dim0 if dim0 is not None else start_dim(spec.n, r)
    start = max(start, spec.n + 1)

    history: list[tuple[int, float]] = []
    for k in dimension_schedule(start, cap, schedule):
        history.append((k, qfi_at_dim(spec, r, k, blocks=blocks)))
        if len(history) < 2 or abs(history[-1][1] - history[-2][1]) >= precision:
            continue
        trace = state_trace(spec, r, k)
        if 1.0 - trace < TRACE_SLACK * precision:
            return QfiOutcome(history[-1][1], k, history, True, precision, trace)
    logger.warning("no convergence for %s at r=%g below cutoff %d", spec, r, cap)
    raise ConvergenceError(f"QFI not converged to {precision:g} below cutoff {cap}", history)


def theta_spread(spec: NoonSpec, r: float, thetas, precision: float = DEFAULT_PRECISION, **kwargs) -> float:
    """Max minus min of the converged QFI over several phases."""
    thetas = list(thetas)
    if len(thetas) < 2:
        raise ValueError("need at least two theta values")
    values = [
        qfi_converged(NoonSpec(spec.encoding, spec.n, t), r, precision, **kwargs).value for t in thetas
    ]
    return max(values) - min(values)


qfi_theta_independence_check = theta_spread
