import numpy as np
import pytest

from onebit_relay.estimation import (
    build_pilot,
    compare_pilots,
    estimate_from_pilots,
    estimation_stats,
    kappa_hadamard,
    lmmse_cov_general,
    sigma_identity,
    sigma_unquantized,
)
from onebit_relay.numerics import complex_gaussian, make_rng
from onebit_relay.quantizer import one_bit_quantize

TWO_OVER_PI = 2.0 / np.pi


def test_identity_pilot_is_scaled_identity():
    # per-user pilot energy is K p_p under both kinds: identity concentrates
    # it in one symbol, so the nonzero entry carries sqrt(K)
    P = build_pilot("identity", 5)
    assert np.array_equal(P, np.sqrt(5) * np.eye(5))


def test_pilot_energy_convention_matches():
    for kind, K in (("identity", 5), ("hadamard", 8)):
        P = build_pilot(kind, K)
        assert np.allclose(P.T @ P, K * np.eye(K))


def test_hadamard_pilot_orthogonal():
    H = build_pilot("hadamard", 8)
    assert np.allclose(H @ H.T, 8 * np.eye(8))
    assert np.all(np.abs(H) == 1)


def test_hadamard_pilot_requires_power_of_two():
    with pytest.raises(ValueError, match="powers of two"):
        build_pilot("hadamard", 6)


def test_unknown_pilot_kind():
    with pytest.raises(ValueError, match="pilot kind"):
        build_pilot("zadoff", 4)


def test_sigma_identity_monotone_with_supremum():
    beta = 0.7
    powers = np.logspace(-2, 4, 30)
    vals = sigma_identity(beta, 4, powers[0])
    for p in powers[1:]:
        nxt = sigma_identity(beta, 4, p)
        assert nxt > vals
        vals = nxt
    assert vals < TWO_OVER_PI * beta
    assert sigma_identity(beta, 4, 1e9) == pytest.approx(TWO_OVER_PI * beta, rel=1e-6)


def test_unquantized_is_pi_over_two_times_quantized():
    betas = np.array([0.3, 0.8, 1.4])
    a = sigma_unquantized(betas, 3, 2.0)
    b = sigma_identity(betas, 3, 2.0)
    assert np.allclose(a, (np.pi / 2.0) * b, atol=1e-15)


def test_general_cov_matches_identity_closed_form():
    rng = make_rng(31)
    for K in (2, 4, 8):
        betas = rng.uniform(0.05, 1.2, K)
        p_p = rng.uniform(0.05, 20.0)
        Q = lmmse_cov_general(build_pilot("identity", K), betas, p_p)
        diag = np.diag(Q).real
        assert np.allclose(diag, sigma_identity(betas, K, p_p), rtol=1e-12)
        off = Q - np.diag(np.diag(Q))
        assert np.abs(off).max() < 1e-12


def test_hadamard_closed_form_accurate_at_low_power():
    betas = np.array([0.6, 0.3, 0.1, 0.9])
    for p_p in (0.02, 0.1):
        Q = lmmse_cov_general(build_pilot("hadamard", 4), betas, p_p)
        approx = np.array([kappa_hadamard(betas, k, 4, p_p) for k in range(4)])
        assert np.allclose(np.diag(Q).real, approx, rtol=0.02)


def test_estimation_stats_consistency():
    betas = np.array([0.5, 1.0])
    st = estimation_stats("identity", betas, 2, 3.0)
    assert np.allclose(st.est_var + st.err_var, betas)
    assert np.array_equal(st.mse, st.err_var)
    assert np.all(st.est_var > 0) and np.all(st.err_var > 0)


def test_compare_pilots_below_average_rule():
    rng = make_rng(32)
    for _ in range(25):
        betas = rng.uniform(0.05, 1.0, 8)
        verdicts = compare_pilots(betas, 8, 0.5)
        mean = betas.mean()
        for beta, verdict in zip(betas, verdicts):
            expect = "identity" if beta < mean else "hadamard"
            assert verdict == expect


def test_compare_pilots_tie_on_equal_betas():
    assert compare_pilots(np.full(4, 0.7), 4, 1.0) == ["tie"] * 4


def test_estimate_from_pilots_statistics():
    rng = make_rng(33)
    M, K, p_p, trials = 48, 4, 1.5, 600
    betas = np.array([0.6, 0.3, 0.1, 0.9])
    pilot = build_pilot("identity", K)
    sq = np.empty((trials, K))
    for t in range(trials):
        G = complex_gaussian(rng, (M, K)) * np.sqrt(betas)
        N = complex_gaussian(rng, (M, K))
        Y = np.sqrt(p_p) * G @ pilot.T + N
        Ghat = estimate_from_pilots(Y, pilot, betas, p_p)
        sq[t] = np.mean(np.abs(Ghat - G) ** 2, axis=0)
    mse = sq.mean(axis=0)
    se = sq.std(axis=0, ddof=1) / np.sqrt(trials)
    expect = estimation_stats("identity", betas, K, p_p).mse
    assert np.all(np.abs(mse - expect) < 3 * se + 1e-12)


def test_estimate_from_pilots_is_linear_in_quantized_output():
    rng = make_rng(34)
    M, K, p_p = 8, 2, 2.0
    betas = np.array([0.5, 1.0])
    pilot = build_pilot("identity", K)
    Y = complex_gaussian(rng, (M, K))
    Ghat = estimate_from_pilots(Y, pilot, betas, p_p)
    # scaling the input leaves the sign pattern, hence the estimate, unchanged
    Ghat2 = estimate_from_pilots(3.7 * Y, pilot, betas, p_p)
    assert np.allclose(Ghat, Ghat2)
    assert np.array_equal(one_bit_quantize(Y), one_bit_quantize(3.7 * Y))


def test_estimate_from_pilots_shape_mismatch():
    with pytest.raises(ValueError):
        estimate_from_pilots(np.ones((4, 3), dtype=complex), build_pilot("identity", 2),
                             np.ones(2), 1.0)
