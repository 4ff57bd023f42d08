"""Unruh channel in a truncated Fock basis.

Alice prepares a NOON state in an Unruh mode. Under the single wedge mapping
(``q_R = 1``, ``q_L = 0``) each excitation lands in Rob's wedge, and the mode
is two-mode squeezed with its partner behind the horizon.  Tracing that
partner out leaves Rob with a mixed state built from the channel blocks

    K(m, m') = Tr_hidden[ T |m><m'| T^dagger ],

whose only nonzero entries sit at ``(m + p, m' + p)``.

All matrices here are hard truncations: nothing is renormalized, so
``1 - trace`` measures how much of the state fell outside the cutoff.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from .errors import DimensionError

# single wedge mapping, fixed
Q_RIGHT = 1.0
Q_LEFT = 0.0


class Encoding(str, enum.Enum):
    SINGLE = "single"
    DUAL = "dual"


@dataclass(frozen=True)
class NoonSpec:
    """NOON input: encoding, excitation number ``n`` and phase ``theta``."""

    encoding: Encoding
    n: int
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "encoding", Encoding(self.encoding))
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"excitation number must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "theta", float(self.theta))


@dataclass(frozen=True)
class ModeSpec:
    """Mode frequency ``omega`` and Rob's proper acceleration ``accel`` (natural units)."""

    omega: float
    accel: float

    def __post_init__(self):
        if not (self.omega > 0 and self.accel > 0):
            raise ValueError(f"omega and accel must be positive, got {self.omega!r}, {self.accel!r}")

    @property
    def ratio(self) -> float:
        return self.omega * math.pi / self.accel


def check_squeezing(r) -> float:
    r = float(r)
    if not (r >= 0 and math.isfinite(r)):
        raise ValueError(f"squeezing parameter must be finite and >= 0, got {r!r}")
    return r


def squeezing_from_mode(mode: ModeSpec) -> float:
    """Squeezing ``r`` with ``tanh r = exp(-omega*pi/accel)``."""
    if not isinstance(mode, ModeSpec):
        mode = ModeSpec(*mode)
    x = mode.ratio
    # artanh(exp(-x)) = -log(tanh(x/2)) / 2, split to keep both ends accurate
    if x < 1.0:
        return -0.5 * math.log(math.tanh(0.5 * x))
    y = math.exp(-x)
    return -0.5 * math.log1p(-2.0 * y / (1.0 + y))


def amplitude_magnitudes(input_n: int, r: float, dim: int) -> np.ndarray:
    """``|A^M_p|`` for p = 0..dim-1, evaluated in log space."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if input_n < 0:
        raise ValueError("input_n must be >= 0")
    r = check_squeezing(r)
    out = np.zeros(dim)
    if r == 0.0:
        out[0] = 1.0
        return out
    p = np.arange(dim, dtype=float)
    m = float(input_n)
    log_mag = (
        p * math.log(math.tanh(r))
        - (m + 1.0) * math.log(math.cosh(r))
        + 0.5 * (gammaln(p + m + 1.0) - gammaln(p + 1.0) - gammaln(m + 1.0))
    )
    return np.exp(log_mag)


def unruh_amplitudes(input_n: int, r: float, dim: int) -> np.ndarray:
    """Complex amplitudes of ``T|M>`` on ``|M+p>_Rob |p>_hidden``, p < dim."""
    mags = amplitude_magnitudes(input_n, r, dim)
    phases = np.array([1, 1j, -1, -1j])[np.arange(dim) % 4]
    return phases * mags


def channel_block(m: int, m_prime: int, r: float, dim: int) -> np.ndarray:
    """Reduced block ``K(m, m')`` on a ``dim``-level truncation.

    The ``i**p`` phases cancel between ket and bra, so the block is real.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    out = np.zeros((dim, dim))
    length = dim - max(m, m_prime)
    if length <= 0:
        return out
    a = amplitude_magnitudes(m, r, length)
    b = amplitude_magnitudes(m_prime, r, length)
    p = np.arange(length)
    out[m + p, m_prime + p] = a * b
    return out


def _check_dim(spec: NoonSpec, dim: int, encoding: Encoding):
    if spec.encoding is not encoding:
        raise ValueError(f"expected a {encoding.value}-rail spec, got {spec.encoding.value}")
    if dim <= spec.n:
        raise DimensionError(f"cutoff {dim} cannot hold {spec.n} excitations")


def _single_parts(spec, r, dim):
    n = spec.n
    diag = channel_block(0, 0, r, dim) + channel_block(n, n, r, dim)
    return diag, channel_block(n, 0, r, dim)


def _dual_parts(spec, r, dim):
    n = spec.n
    k00 = channel_block(0, 0, r, dim)
    knn = channel_block(n, n, r, dim)
    kn0 = channel_block(n, 0, r, dim)
    diag = np.kron(knn, k00) + np.kron(k00, knn)
    # the e^{iN theta} branch is |0, N>; its coherence with <N, 0|
    return diag, np.kron(kn0.T, kn0)


def _parts(spec, r, dim):
    r = check_squeezing(r)
    if spec.encoding is Encoding.SINGLE:
        _check_dim(spec, dim, Encoding.SINGLE)
        return _single_parts(spec, r, dim)
    _check_dim(spec, dim, Encoding.DUAL)
    return _dual_parts(spec, r, dim)


def rob_state_single(spec: NoonSpec, r: float, dim: int) -> np.ndarray:
    """Rob's reduced state for a single-rail NOON input, ``dim`` levels."""
    _check_dim(spec, dim, Encoding.SINGLE)
    return rob_state(spec, r, dim)


def rob_state_dual(spec: NoonSpec, r: float, dim_per_mode: int) -> np.ndarray:
    """Rob's two-mode reduced state, basis index ``a * dim_per_mode + b``."""
    _check_dim(spec, dim_per_mode, Encoding.DUAL)
    return rob_state(spec, r, dim_per_mode)


def rob_state(spec: NoonSpec, r: float, dim: int) -> np.ndarray:
    diag, coh = _parts(spec, r, dim)
    phase = np.exp(1j * spec.n * spec.theta)
    # conj pairs give exact hermiticity without symmetrizing
    return 0.5 * (diag + phase * coh + np.conj(phase) * coh.T)


def rob_state_derivative(spec: NoonSpec, r: float, dim: int) -> np.ndarray:
    """Analytic ``d rho / d theta``; only the coherence blocks survive."""
    _, coh = _parts(spec, r, dim)
    q = 1j * spec.n * np.exp(1j * spec.n * spec.theta)
    return 0.5 * (q * coh + np.conj(q) * coh.T)


class Chain(NamedTuple):
    """One tridiagonal block of rho.

    ``indices`` are positions in the dense basis, ``diag`` the diagonal of
    rho there and ``coh`` the magnitudes of the couplings between neighbours;
    ``rho[indices[t+1], indices[t]] = phase * coh[t]``.
    """

    indices: np.ndarray
    diag: np.ndarray
    coh: np.ndarray


def state_chains(spec: NoonSpec, r: float, dim: int) -> tuple[list[Chain], complex, complex]:
    """Split rho (and rho') into independent tridiagonal blocks.

    Single rail: the coherence only links ``j`` and ``j + N``, so Fock
    residues mod N decouple.  Dual rail: total photon number is conserved
    and, inside a sector, ``(a, b)`` only links ``(a + N, b - N)``.

    Returns the chains, the phase on their lower off-diagonal and the
    theta-derivative of that phase (which is what rho' carries).
    """
    r = check_squeezing(r)
    n = spec.n
    if spec.encoding is Encoding.SINGLE:
        _check_dim(spec, dim, Encoding.SINGLE)
        v = amplitude_magnitudes(0, r, dim)
        w = amplitude_magnitudes(n, r, dim - n)
        diag = v * v
        diag[n:] += w * w
        diag *= 0.5
        coh = 0.5 * w * v[: dim - n]
        idx = np.arange(dim)
        chains = [Chain(idx[c::n], diag[c::n], coh[c::n]) for c in range(min(n, dim))]
        phase = np.exp(1j * n * spec.theta)
        return chains, phase, 1j * n * phase

    _check_dim(spec, dim, Encoding.DUAL)
    v = amplitude_magnitudes(0, r, dim)
    w = amplitude_magnitudes(n, r, dim - n)
    vac = v * v
    shifted = np.zeros(dim)
    shifted[n:] = w * w
    cpl = w * v[: dim - n]
    chains = []
    for total in range(2 * dim - 1):
        lo, hi = max(0, total - dim + 1), min(total, dim - 1)
        for c in range(lo, min(lo + n, hi + 1)):
            a = np.arange(c, hi + 1, n)
            b = total - a
            d = 0.5 * (shifted[a] * vac[b] + vac[a] * shifted[b])
            # link (a, b) -> (a + N, b - N) carries c_a * c_{b-N}
            at = a[:-1]
            e = 0.5 * cpl[at] * cpl[b[:-1] - n]
            chains.append(Chain(a * dim + b, d, e))
    # dual coherence sits above the diagonal with e^{iN theta}
    phase = np.exp(-1j * n * spec.theta)
    return chains, phase, -1j * n * phase


def chains_to_dense(chains: list[Chain], phase: complex, size: int, derivative: bool = False):
    """Reassemble rho, or rho' when ``phase`` is the derivative phase."""
    out = np.zeros((size, size), dtype=complex)
    for ch in chains:
        if not derivative:
            out[ch.indices, ch.indices] = ch.diag
        if len(ch.indices) > 1:
            lo, hi = ch.indices[:-1], ch.indices[1:]
            out[hi, lo] = phase * ch.coh
            out[lo, hi] = np.conj(phase) * ch.coh
    return out
