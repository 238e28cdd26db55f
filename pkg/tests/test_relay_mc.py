import numpy as np
import pytest

from onebit_relay.channel import SystemConfig, generate_channels
from onebit_relay.numerics import make_rng
from onebit_relay.rate_closed import ONE_BIT, closed_form_rate
from onebit_relay.relay_mc import approx_rate_mc, exact_rate_mc, relay_chain_once


def symmetric_config(M=32, K=4, **kw):
    base = dict(beta_SR=np.ones(K), beta_RD=np.ones(K), p_p=10.0, p_S=10.0, p_R=10.0)
    base.update(kw)
    return SystemConfig(M=M, K=K, **base)


def test_chain_stats_shapes_and_gain():
    cfg = symmetric_config(M=24, K=3, p_R=6.0)
    ch = generate_channels(cfg, make_rng(61))
    st = relay_chain_once(ch, cfg)
    assert st.R_yy.shape == (24, 24)
    assert st.R_xx.shape == (24, 24)
    assert st.W.shape == (24, 24)
    assert st.gamma == pytest.approx(np.sqrt(6.0 / 24.0))
    assert st.dac_output_power is None


def test_chain_transmit_power_is_antenna_count():
    # every one-bit DAC output has unit modulus, so the squared norm of the
    # transmit vector equals M for every symbol, not just on average
    cfg = symmetric_config(M=16, K=2, p_R=4.0)
    ch = generate_channels(cfg, make_rng(62))
    st = relay_chain_once(ch, cfg, rng=make_rng(63), n_symbols=50)
    assert st.dac_output_power == pytest.approx(16.0, abs=1e-12)


def test_chain_covariances_hermitian_psd():
    cfg = symmetric_config(M=20, K=3)
    ch = generate_channels(cfg, make_rng(64))
    st = relay_chain_once(ch, cfg)
    for R in (st.R_yy, st.R_xx):
        assert np.allclose(R, R.conj().T)
        assert np.linalg.eigvalsh(R).min() > -1e-9


def test_exact_mc_deterministic_under_seed():
    cfg = symmetric_config(M=16, K=2)
    a = exact_rate_mc(cfg, trials=20, rng=make_rng(65))
    b = exact_rate_mc(cfg, trials=20, rng=make_rng(65))
    assert np.array_equal(a.per_user_rate, b.per_user_rate)
    assert np.array_equal(a.std_err, b.std_err)


def test_exact_mc_report_fields():
    cfg = symmetric_config(M=16, K=3)
    rep = exact_rate_mc(cfg, trials=25, rng=make_rng(66))
    assert rep.per_user_rate.shape == (3,)
    assert rep.std_err.shape == (3,)
    assert rep.trials == 25
    assert rep.hw_case is ONE_BIT
    assert rep.sum_rate == pytest.approx(rep.per_user_rate.sum())
    assert np.all(rep.per_user_rate > 0)
    assert np.all(rep.std_err > 0)


def test_single_trial_has_zero_std_err():
    cfg = symmetric_config(M=8, K=2)
    rep = exact_rate_mc(cfg, trials=1, rng=make_rng(67))
    assert np.array_equal(rep.std_err, np.zeros(2))


def test_prefactor_toggles():
    cfg = symmetric_config(M=16, K=2)
    a = exact_rate_mc(cfg, trials=10, rng=make_rng(68), include_prefactor=True)
    b = exact_rate_mc(cfg, trials=10, rng=make_rng(68), include_prefactor=False)
    assert np.allclose(a.per_user_rate, cfg.rate_prefactor() * b.per_user_rate)


def test_approx_mc_matches_closed_form():
    cfg = symmetric_config(M=64, K=5)
    rep = approx_rate_mc(cfg, trials=400, rng=make_rng(69))
    closed = closed_form_rate(cfg, ONE_BIT)
    dev = np.abs(rep.per_user_rate - closed.per_user_rate) / rep.std_err
    assert dev.max() < 3.0


def test_exact_mc_below_approx_at_small_k():
    # the closed form rests on channel-hardening arguments that overshoot
    # when few users share the array
    cfg = symmetric_config(M=128, K=2)
    exact = exact_rate_mc(cfg, trials=150, rng=make_rng(70))
    approx = approx_rate_mc(cfg, trials=150, rng=make_rng(71))
    assert exact.sum_rate < approx.sum_rate


def test_methods_are_labeled():
    cfg = symmetric_config(M=8, K=2)
    assert exact_rate_mc(cfg, trials=3, rng=make_rng(72)).method == "exact-mc"
    assert approx_rate_mc(cfg, trials=3, rng=make_rng(73)).method == "approx-mc"


def test_mc_accepts_default_rng():
    cfg = symmetric_config(M=8, K=2)
    rep = approx_rate_mc(cfg, trials=5)
    assert np.all(np.isfinite(rep.per_user_rate))
