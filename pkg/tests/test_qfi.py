import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from unruhqfi import fock, qfi
from unruhqfi.errors import ConvergenceError, InvalidStateError
from unruhqfi.fock import NoonSpec


def random_density(rng, d, rank=None):
    rank = rank or d
    x = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return x + x.conj().T


def test_eigh_simple():
    assert qfi.eigh(np.eye(2) / 2).eigenvalues.tolist() == pytest.approx([0.5, 0.5])
    ket = np.array([1, 1j, 0]) / math.sqrt(2)
    spec = qfi.eigh(np.outer(ket, ket.conj()))
    np.testing.assert_allclose(spec.eigenvalues, [1, 0, 0], atol=1e-15)
    assert np.all(spec.eigenvalues >= 0)


def test_eigh_reconstructs():
    rng = np.random.default_rng(0)
    rho = random_density(rng, 7)
    s = qfi.eigh(rho)
    v = s.eigenvectors
    np.testing.assert_allclose(v @ np.diag(s.eigenvalues) @ v.conj().T, rho, atol=1e-10 * 7)
    assert np.all(np.diff(s.eigenvalues) <= 0)


def test_eigh_trace_of_rob_state():
    rho = fock.rob_state_single(NoonSpec("single", 1, 0.3), 0.5, 30)
    assert qfi.eigh(rho).eigenvalues.sum() == pytest.approx(np.diag(rho).real.sum(), abs=1e-10)


def test_eigh_rejects_negative():
    with pytest.raises(InvalidStateError):
        qfi.eigh(np.diag([1.0, -1e-3]))
    # numerical noise is clamped
    assert qfi.eigh(np.diag([1.0, -1e-14])).eigenvalues[-1] == 0


def test_sld_maximally_mixed():
    rng = np.random.default_rng(1)
    d = 5
    s = qfi.eigh(np.eye(d) / d)
    b = random_hermitian(rng, d)
    lowered = qfi.sld_lower(s, b)
    v = s.eigenvectors
    np.testing.assert_allclose(v @ lowered @ v.conj().T, d * b, atol=1e-12)


def test_sld_of_rho_is_identity_on_support():
    rng = np.random.default_rng(2)
    rho = random_density(rng, 6, rank=3)
    s = qfi.eigh(rho)
    lowered = qfi.sld_lower(s, rho)
    np.testing.assert_allclose(np.diag(lowered)[:3].real, 1, atol=1e-10)
    np.testing.assert_allclose(np.diag(lowered)[3:], 0, atol=1e-12)


def test_sld_lyapunov_identity():
    rng = np.random.default_rng(3)
    rho = random_density(rng, 4)
    b = random_hermitian(rng, 4)
    s = qfi.eigh(rho)
    v = s.eigenvectors
    sld = v @ qfi.sld_lower(s, b) @ v.conj().T
    np.testing.assert_allclose(rho @ sld + sld @ rho, 2 * b, atol=1e-10)


def test_sld_shape_mismatch():
    s = qfi.eigh(np.eye(3) / 3)
    with pytest.raises(ValueError):
        qfi.sld_lower(s, np.eye(4))


@pytest.mark.parametrize("enc,n,d", [("single", 3, 4), ("single", 3, 12), ("dual", 2, 3), ("dual", 2, 6)])
def test_noiseless_heisenberg(enc, n, d):
    spec = NoonSpec(enc, n, 1.3)
    assert qfi.qfi_at_dim(spec, 0.0, d) == pytest.approx(n * n, abs=1e-12)
    assert qfi.qfi_at_dim(spec, 0.0, d, blocks=False) == pytest.approx(n * n, abs=1e-12)


def test_against_sylvester_oracle():
    spec, r, d = NoonSpec("single", 1, 0.9), 0.6, 60
    rho = fock.rob_state(spec, r, d)
    drho = fock.rob_state_derivative(spec, r, d)
    sld = sla.solve_sylvester(rho, rho, 2 * drho)
    oracle = np.trace(drho @ sld).real
    assert abs(qfi.qfi_at_dim(spec, r, d) - oracle) < 1e-8
    assert abs(qfi.qfi_at_dim(spec, r, d, blocks=False) - oracle) < 1e-8


def test_lyapunov_oracle_random_instances():
    rng = np.random.default_rng(11)
    for _ in range(10):
        d = int(rng.integers(2, 7))
        rho = random_density(rng, d)
        b = random_hermitian(rng, d) * 0.1
        b -= np.trace(b) / d * np.eye(d)
        assert qfi.qfi_from_state(rho, b) == pytest.approx(qfi.qfi_lyapunov(rho, b), abs=1e-8)


def test_pure_state_qfi():
    # pure states: F = 4 (<dpsi|dpsi> - |<psi|dpsi>|^2)
    rng = np.random.default_rng(5)
    h = random_hermitian(rng, 4)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    dpsi = -1j * h @ psi
    rho = np.outer(psi, psi.conj())
    drho = np.outer(dpsi, psi.conj()) + np.outer(psi, dpsi.conj())
    var = (psi.conj() @ h @ h @ psi - (psi.conj() @ h @ psi) ** 2).real
    assert qfi.qfi_from_state(rho, drho) == pytest.approx(4 * var, rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_basis_invariance(seed):
    rng = np.random.default_rng(seed)
    spec = NoonSpec("single", int(rng.integers(1, 4)), rng.uniform(0, 6))
    d = spec.n + int(rng.integers(2, 8))
    r = rng.uniform(0.05, 1.2)
    rho = fock.rob_state(spec, r, d)
    drho = fock.rob_state_derivative(spec, r, d)
    u, _ = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    rotated = qfi.qfi_from_state(u @ rho @ u.conj().T, u @ drho @ u.conj().T)
    assert rotated == pytest.approx(qfi.qfi_from_state(rho, drho), abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["single", "dual"]), st.integers(1, 4), st.floats(0, 6.3), st.floats(0, 2.0))
def test_qfi_nonnegative(enc, n, theta, r):
    d = n + 10 if enc == "single" else n + 4
    assert qfi.qfi_at_dim(NoonSpec(enc, n, theta), r, d) >= 0


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("r", [0.2, 0.6, 1.0])
@pytest.mark.parametrize("d", [20, 60])
def test_block_path_single(n, r, d):
    spec = NoonSpec("single", n, 0.4)
    assert abs(qfi.qfi_at_dim(spec, r, d) - qfi.qfi_at_dim(spec, r, d, blocks=False)) < 1e-9


@pytest.mark.parametrize("r", [0.3, 0.8])
@pytest.mark.parametrize("d", [8, 20])
def test_block_path_dual(r, d):
    spec = NoonSpec("dual", 1, 0.4)
    assert abs(qfi.qfi_at_dim(spec, r, d) - qfi.qfi_at_dim(spec, r, d, blocks=False)) < 1e-9


def test_converged_noiseless_first_step():
    out = qfi.qfi_converged(NoonSpec("single", 1), 0.0)
    assert out.value == pytest.approx(1.0)
    assert len(out.history) == 2
    assert out.converged and out.trace == pytest.approx(1.0)


def test_converged_contract():
    out = qfi.qfi_converged(NoonSpec("single", 3, 0.2), 1.2, 1e-5)
    assert abs(out.history[-1][1] - out.history[-2][1]) < 1e-5
    assert out.value == out.history[-1][1]
    assert out.dim_used == out.history[-1][0]
    assert out.trace_deficit < 10 * 1e-5


def test_converged_independent_of_start():
    spec = NoonSpec("single", 5, 0.4)
    a = qfi.qfi_converged(spec, 1.0, 1e-5)
    b = qfi.qfi_converged(spec, 1.0, 1e-5, dim0=spec.n + 60)
    assert abs(a.value - b.value) < 2e-5


def test_unit_step_schedule_agrees():
    spec = NoonSpec("single", 2, 0.4)
    fast = qfi.qfi_converged(spec, 0.7, 1e-6)
    slow = qfi.qfi_converged(spec, 0.7, 1e-6, schedule="unit-step")
    assert np.diff([k for k, _ in slow.history]).tolist() == [1] * (len(slow.history) - 1)
    assert abs(fast.value - slow.value) < 2e-6


def test_converged_cap():
    with pytest.raises(ConvergenceError) as info:
        qfi.qfi_converged(NoonSpec("single", 2), 2.0, dim_cap=30)
    assert info.value.history and info.value.history[-1][0] == 30


def test_bad_precision():
    with pytest.raises(ValueError):
        qfi.qfi_converged(NoonSpec("single", 2), 0.5, 0.0)


def test_theta_independence():
    assert qfi.theta_spread(NoonSpec("single", 3), 0.7, [0.0, 2 * math.pi / 3]) < 1e-12
    assert qfi.theta_spread(NoonSpec("single", 2), 0.5, [0, 0.3, 1.0, 2.5]) < 1e-6
    assert qfi.theta_spread(NoonSpec("dual", 1), 0.8, [0.1, 1.7]) < 1e-6


def test_noise_lowers_qfi():
    clean = qfi.qfi_converged(NoonSpec("single", 2), 0.0).value
    noisy = qfi.qfi_converged(NoonSpec("single", 2), 0.5).value
    assert noisy < clean
