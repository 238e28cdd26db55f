import numpy as np
import pytest

from onebit_relay.numerics import complex_gaussian, make_rng
from onebit_relay.quantizer import (
    bussgang_gain,
    one_bit_quantize,
    quantization_noise_cov,
    quantizer_stats,
)

TWO_OVER_PI = 2.0 / np.pi


def random_covariance(rng, n, load=0.3):
    A = complex_gaussian(rng, (n, 4 * n))
    return A @ A.conj().T / (4 * n) + load * np.eye(n)


def test_quantize_alphabet():
    z = one_bit_quantize(complex_gaussian(make_rng(0), 1000))
    assert np.allclose(np.abs(z.real), np.sqrt(0.5))
    assert np.allclose(np.abs(z.imag), np.sqrt(0.5))
    assert np.allclose(np.abs(z), 1.0)


def test_quantize_zero_maps_to_positive():
    z = one_bit_quantize(np.array([0.0 + 0.0j, -0.0 - 0.0j]))
    assert np.allclose(z, np.sqrt(0.5) * (1 + 1j))


def test_quantize_preserves_quadrant():
    y = np.array([3 - 2j, -1 + 4j, -2 - 2j, 5 + 1j])
    z = one_bit_quantize(y)
    assert np.array_equal(np.sign(z.real), np.sign(y.real))
    assert np.array_equal(np.sign(z.imag), np.sign(y.imag))


def test_bussgang_gain_diagonal():
    R = random_covariance(make_rng(1), 5)
    a = bussgang_gain(R)
    expect = np.sqrt(TWO_OVER_PI / np.diag(R).real)
    assert np.allclose(a, expect, atol=1e-14)


def test_output_cov_unit_diagonal_exact():
    stats = quantizer_stats(random_covariance(make_rng(2), 7))
    assert np.array_equal(np.diag(stats.output_cov), np.ones(7))


def test_noise_cov_diagonal_exact():
    stats = quantizer_stats(random_covariance(make_rng(3), 6))
    assert np.allclose(np.diag(stats.noise_cov), 1.0 - TWO_OVER_PI, atol=1e-15)


def test_output_cov_hermitian_psd():
    stats = quantizer_stats(random_covariance(make_rng(4), 8))
    assert np.allclose(stats.output_cov, stats.output_cov.conj().T)
    assert np.linalg.eigvalsh(stats.output_cov).min() > -1e-12
    assert np.linalg.eigvalsh(stats.noise_cov).min() > -1e-12


def test_identity_input_passes_through():
    stats = quantizer_stats(np.eye(4, dtype=np.complex128))
    assert np.allclose(stats.output_cov, np.eye(4), atol=1e-15)
    assert np.allclose(stats.gain, np.sqrt(TWO_OVER_PI))


def test_arcsine_matches_two_antenna_simulation():
    rng = make_rng(5)
    rho = 0.62
    n = 200000
    z1 = complex_gaussian(rng, n)
    z2 = rho * z1 + np.sqrt(1 - rho**2) * complex_gaussian(rng, n)
    R = np.array([[1.0, rho], [rho, 1.0]], dtype=np.complex128)
    stats = quantizer_stats(R)
    q1, q2 = one_bit_quantize(z1), one_bit_quantize(z2)
    emp = np.mean(q1 * np.conj(q2))
    assert abs(emp - stats.output_cov[0, 1]) < 5 / np.sqrt(n)


def test_quantization_noise_cov_alias():
    R = random_covariance(make_rng(6), 5)
    a = quantization_noise_cov(R)
    b = quantizer_stats(R)
    assert np.array_equal(a.noise_cov, b.noise_cov)


def test_rejects_non_square():
    with pytest.raises(ValueError):
        quantizer_stats(np.ones((2, 3)))
