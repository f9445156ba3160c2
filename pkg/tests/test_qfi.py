import numpy as np
import pytest

from mixqfi.qfi import (
    DensityOperator,
    HermitianOperator,
    block_norm_bound,
    brute_force_max,
    haar_random_unitary,
    max_qfi,
    offdiag_block_sqnorm,
    optimal_basis,
    optimal_state,
    qfi,
)
from mixqfi.verify import random_spectrum


def _herm(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return HermitianOperator(z + z.conj().T)


def test_pure_qubit_channel_value():
    assert max_qfi([1.0, 0.0], [1.0, -1.0]) == pytest.approx(4.0)
    rho = optimal_state([1.0, 0.0], HermitianOperator.diag([1.0, -1.0]))
    assert qfi(rho, np.diag([1.0, -1.0])) == pytest.approx(4.0)


def test_rank_four_five_level_value():
    assert max_qfi([0.4, 0.3, 0.2, 0.1, 0.0], [2, 1, 0, -1, -2]) == pytest.approx(6.8, abs=1e-14)


def test_uniform_spectrum_gives_zero():
    assert max_qfi(np.full(4, 0.25), [3, 1, -1, -3]) == 0.0


def test_qfi_matches_pure_state_variance(rng):
    # for a pure state the QFI is four times the variance of h
    d = 4
    h = _herm(rng, d)
    u = haar_random_unitary(d, seed=rng)
    psi = u[:, 0]
    mean = np.vdot(psi, h.matrix @ psi).real
    var = np.vdot(h.matrix @ psi, h.matrix @ psi).real - mean**2
    rho = DensityOperator(np.array([1.0, 0, 0, 0]), u)
    assert qfi(rho, h) == pytest.approx(4 * var, rel=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6, 7])
def test_optimal_state_saturates(rng, d):
    for _ in range(20):
        p = random_spectrum(rng, d)
        h = _herm(rng, d)
        phases = rng.uniform(0, 2 * np.pi, d // 2)
        rho = optimal_state(p, h, phases)
        assert abs(qfi(rho, h) - max_qfi(p, h.eigvals)) < 1e-10 * max(1, max_qfi(p, h.eigvals))


def test_haar_never_exceeds_bound(rng):
    for d in (2, 3, 5):
        p = random_spectrum(rng, d)
        h = _herm(rng, d)
        bound = max_qfi(p, h.eigvals)
        us = haar_random_unitary(d, seed=rng, size=300)
        assert all(qfi(DensityOperator(p, u), h) <= bound + 1e-9 for u in us)


def test_haar_unitary_properties():
    us = haar_random_unitary(3, seed=1, size=5)
    for u in us:
        np.testing.assert_allclose(u.conj().T @ u, np.eye(3), atol=1e-12)
    np.testing.assert_array_equal(haar_random_unitary(3, seed=7), haar_random_unitary(3, seed=7))


def test_brute_force_converges(rng):
    for d in (2, 3, 4):
        p = random_spectrum(rng, d)
        h = _herm(rng, d)
        rep = brute_force_max(p, h, budget=10000, seed=3)
        assert rep.value <= rep.bound + 1e-9
        assert rep.ratio >= 1 - 1e-4


def test_block_norm_bound_and_equality(rng):
    for _ in range(200):
        d = int(rng.integers(2, 9))
        h = _herm(rng, d)
        k = int(rng.integers(1, d))
        u = haar_random_unitary(d, seed=rng)
        assert offdiag_block_sqnorm(h, u, k) <= block_norm_bound(h.eigvals, k) + 1e-12
        half = d // 2
        eq = offdiag_block_sqnorm(h, optimal_basis(h), half)
        assert eq == pytest.approx(block_norm_bound(h.eigvals, half), abs=1e-10)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        HermitianOperator([[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        DensityOperator(np.array([0.5, 0.5]), np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        max_qfi([0.5, 0.5], [1, 0, -1])
    with pytest.raises(IndexError):
        offdiag_block_sqnorm(np.eye(3), np.eye(3), 3)
