import numpy as np
import pytest

from onebit_relay.channel import SystemConfig, est_variances
from onebit_relay.estimation import sigma_unquantized
from onebit_relay.numerics import make_rng
from onebit_relay.rate_closed import (
    ALL_CASES,
    IDEAL,
    ONE_BIT,
    ONE_BIT_ADC,
    ONE_BIT_DAC,
    InfeasibleTargetError,
    closed_form_rate,
    closed_form_sinr,
    rate_ordering_check,
    rate_ratios,
    required_antennas,
    required_power,
    scaling_limit,
)


def random_config(rng, M=64, K=4, **kw):
    return SystemConfig(
        M=M, K=K,
        beta_SR=rng.uniform(0.1, 1.0, K),
        beta_RD=rng.uniform(0.1, 1.0, K),
        p_p=rng.uniform(0.5, 10.0),
        p_S=rng.uniform(0.5, 10.0, K),
        p_R=rng.uniform(0.5, 10.0),
        **kw,
    )


def reference_sinr(cfg, hw_case):
    """Scalar-loop evaluation of the per-user SINR, kept deliberately naive."""
    K, M = cfg.K, cfg.M
    p, p_R = cfg.p_S, cfg.p_R
    if hw_case.adc == "one-bit":
        v_sr, v_rd = est_variances(cfg)
    else:
        v_sr = sigma_unquantized(cfg.beta_SR, K, cfg.p_p)
        v_rd = sigma_unquantized(cfg.beta_RD, K, cfg.p_p)
    c_a = np.pi / 2.0 if hw_case.adc == "one-bit" else 1.0
    c_d = np.pi / 2.0 if hw_case.dac == "one-bit" else 1.0
    S = sum(v_sr[i] * v_rd[i] for i in range(K))
    T = sum(p[i] * v_sr[i] ** 2 * v_rd[i] for i in range(K))
    P = 1.0 + sum(p[i] * cfg.beta_SR[i] for i in range(K))
    out = np.empty(K)
    for k in range(K):
        t_k = M * v_rd[k] ** 2 * v_sr[k] + cfg.beta_RD[k] * S
        zeta = M**2 * T + c_a * M * P * S
        signal = p[k] * M**4 * v_sr[k] ** 2 * v_rd[k] ** 2
        est_err = p[k] * M**2 * (
            M * v_sr[k] ** 2 * v_rd[k] * cfg.beta_RD[k] + cfg.beta_SR[k] * t_k
        )
        interf = M**2 * (
            M * cfg.beta_RD[k] * (T - p[k] * v_sr[k] ** 2 * v_rd[k])
            + t_k * (P - 1.0 - p[k] * cfg.beta_SR[k])
        )
        relay_noise = M**2 * t_k
        adc_noise = (c_a - 1.0) * P * M**2 * t_k
        dac_noise = (c_d - 1.0) * M * cfg.beta_RD[k] * zeta
        dest_noise = c_d * (M / p_R) * zeta
        out[k] = signal / (
            est_err + interf + relay_noise + adc_noise + dac_noise + dest_noise
        )
    return out


@pytest.mark.parametrize("case", ALL_CASES, ids=lambda c: c.label)
def test_sinr_matches_naive_reference(case):
    rng = make_rng(51)
    for _ in range(5):
        cfg = random_config(rng, M=rng.integers(8, 200))
        got = closed_form_sinr(cfg, case)
        ref = reference_sinr(cfg, case)
        assert np.allclose(got, ref, rtol=1e-12)


def test_rate_is_prefactored_log():
    cfg = random_config(make_rng(52))
    rep = closed_form_rate(cfg, ONE_BIT)
    sinr = closed_form_sinr(cfg, ONE_BIT)
    expect = cfg.rate_prefactor() * np.log2(1.0 + sinr)
    assert np.allclose(rep.per_user_rate, expect)
    assert rep.sum_rate == pytest.approx(expect.sum())


def test_rate_without_prefactor():
    cfg = random_config(make_rng(53))
    a = closed_form_rate(cfg, ONE_BIT, include_prefactor=True)
    b = closed_form_rate(cfg, ONE_BIT, include_prefactor=False)
    assert np.allclose(a.per_user_rate, cfg.rate_prefactor() * b.per_user_rate)


def test_rate_monotone_in_antennas():
    rng = make_rng(54)
    cfg = random_config(rng, M=32)
    rates = [
        closed_form_rate(SystemConfig(
            M=m, K=cfg.K, beta_SR=cfg.beta_SR, beta_RD=cfg.beta_RD,
            p_p=cfg.p_p, p_S=cfg.p_S, p_R=cfg.p_R,
        ), ONE_BIT).sum_rate
        for m in (16, 32, 64, 128, 256)
    ]
    assert all(b > a for a, b in zip(rates, rates[1:]))


def test_case_ordering_at_large_m():
    cfg = SystemConfig(M=512, K=5, beta_SR=np.ones(5), beta_RD=np.ones(5),
                       p_p=10.0, p_S=10.0, p_R=10.0)
    rep = rate_ordering_check(cfg)
    assert rep.holds
    assert rep.ordering == ["I", "II", "III", "IV"]
    assert rep.warning is None
    assert np.all(rep.sinr_ratio > 1.0)


def test_case_ordering_warning_at_small_m():
    cfg = SystemConfig(M=4, K=4, beta_SR=np.ones(4), beta_RD=np.ones(4),
                       p_p=10.0, p_S=10.0, p_R=10.0)
    rep = rate_ordering_check(cfg)
    if not rep.holds:
        assert rep.warning is not None


def test_ideal_case_beats_every_degraded_case():
    rng = make_rng(55)
    for _ in range(5):
        cfg = random_config(rng, M=128)
        best = closed_form_rate(cfg, IDEAL).sum_rate
        for case in (ONE_BIT_DAC, ONE_BIT_ADC, ONE_BIT):
            assert closed_form_rate(cfg, case).sum_rate < best


def test_scaling_limit_matches_finite_m_trend():
    cfg = SystemConfig(M=64, K=3, beta_SR=[0.5, 1.0, 0.8], beta_RD=[0.4, 0.9, 0.6],
                       p_p=10.0, p_S=10.0, p_R=10.0)
    lim = scaling_limit(cfg, "source", 2.0)
    finite = closed_form_rate(
        SystemConfig(M=2**16, K=3, beta_SR=cfg.beta_SR, beta_RD=cfg.beta_RD,
                     p_p=10.0, p_S=2.0 / 2**16, p_R=10.0), ONE_BIT
    ).per_user_rate
    assert np.allclose(finite, lim.one_bit, rtol=0.01)


def test_scaling_limit_rejects_bad_args():
    cfg = SystemConfig(M=8, K=2, beta_SR=np.ones(2), beta_RD=np.ones(2))
    with pytest.raises(ValueError):
        scaling_limit(cfg, "source", -1.0)
    with pytest.raises(ValueError):
        scaling_limit(cfg, "sideways", 1.0)


def test_rate_ratios_bounded():
    cfg = SystemConfig(M=256, K=5, beta_SR=np.ones(5), beta_RD=np.ones(5),
                       p_p=10.0, p_S=10.0, p_R=10.0)
    for scaling in ("source", "relay"):
        ratios = rate_ratios(cfg, scaling, 1e-3)
        assert len(ratios) == 3
        assert all(0.0 < r <= 1.0 for r in ratios)


def test_required_power_achieves_target():
    cfg = SystemConfig(M=128, K=5, beta_SR=np.ones(5), beta_RD=np.ones(5),
                       p_p=10.0, p_S=10.0, p_R=10.0)
    target = 4.0
    for which in ("source", "relay"):
        p = required_power(cfg, ONE_BIT, target, which=which)
        reached = closed_form_rate(
            SystemConfig(M=128, K=5, beta_SR=np.ones(5), beta_RD=np.ones(5),
                         p_p=10.0,
                         p_S=p if which == "source" else 10.0,
                         p_R=p if which == "relay" else 10.0),
            ONE_BIT).sum_rate
        assert reached == pytest.approx(target, rel=2e-3)
        # a 2% power cut must fall short: p is minimal
        short = closed_form_rate(
            SystemConfig(M=128, K=5, beta_SR=np.ones(5), beta_RD=np.ones(5),
                         p_p=10.0,
                         p_S=0.98 * p if which == "source" else 10.0,
                         p_R=0.98 * p if which == "relay" else 10.0),
            ONE_BIT).sum_rate
        assert short < target


def test_required_power_edge_cases():
    cfg = SystemConfig(M=32, K=2, beta_SR=np.ones(2), beta_RD=np.ones(2), p_p=10.0)
    assert required_power(cfg, ONE_BIT, 0.0) == 0.0
    with pytest.raises(InfeasibleTargetError):
        required_power(cfg, ONE_BIT, 50.0)
    with pytest.raises(ValueError):
        required_power(cfg, ONE_BIT, 1.0, which="both")


def test_required_antennas_is_minimal():
    cfg = SystemConfig(M=8, K=5, beta_SR=np.ones(5), beta_RD=np.ones(5),
                       p_p=10.0, p_S=10.0, p_R=0.1)
    target = 5.0
    M_req = required_antennas(cfg, IDEAL, target)
    at = closed_form_rate(
        SystemConfig(M=M_req, K=5, beta_SR=np.ones(5), beta_RD=np.ones(5),
                     p_p=10.0, p_S=10.0, p_R=0.1), IDEAL).sum_rate
    below = closed_form_rate(
        SystemConfig(M=M_req - 1, K=5, beta_SR=np.ones(5), beta_RD=np.ones(5),
                     p_p=10.0, p_S=10.0, p_R=0.1), IDEAL).sum_rate
    assert at >= target > below


def test_required_antennas_edge_cases():
    cfg = SystemConfig(M=8, K=2, beta_SR=np.ones(2), beta_RD=np.ones(2))
    assert required_antennas(cfg, IDEAL, 0.0) == 1
    with pytest.raises(InfeasibleTargetError):
        required_antennas(cfg, ONE_BIT, 1e9, M_max=256)
