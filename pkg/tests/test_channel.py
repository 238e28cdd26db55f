import numpy as np
import pytest

from onebit_relay.channel import (
    SystemConfig,
    est_variances,
    generate_channels,
    large_scale_from_geometry,
    read_config,
    write_config,
)
from onebit_relay.estimation import kappa_hadamard, sigma_identity
from onebit_relay.numerics import make_rng


def test_config_defaults():
    cfg = SystemConfig(M=64, K=4, beta_SR=np.ones(4), beta_RD=np.ones(4))
    assert cfg.tau_p == 4
    assert cfg.tau_c == 200
    assert cfg.p_S.shape == (4,)
    assert cfg.rate_prefactor() == pytest.approx((200 - 8) / 400)


def test_config_broadcasts_scalar_power():
    cfg = SystemConfig(M=8, K=3, beta_SR=np.ones(3), beta_RD=np.ones(3), p_S=2.5)
    assert np.array_equal(cfg.p_S, [2.5, 2.5, 2.5])


@pytest.mark.parametrize(
    "kwargs, match",
    [
        (dict(M=0, K=2), "positive"),
        (dict(M=8, K=2, beta_SR=np.ones(3)), "length K"),
        (dict(M=8, K=2, beta_SR=np.array([1.0, -1.0])), "positive"),
        (dict(M=8, K=2, p_R=-1.0), "nonnegative"),
        (dict(M=8, K=2, tau_p=1), "at least K"),
        (dict(M=8, K=2, tau_c=4), "must exceed"),
        (dict(M=8, K=2, pilot_kind="fourier"), "pilot kind"),
    ],
)
def test_config_validation(kwargs, match):
    base = dict(M=8, K=2, beta_SR=np.ones(2), beta_RD=np.ones(2))
    base.update(kwargs)
    with pytest.raises(ValueError, match=match):
        SystemConfig(**base)


def test_hadamard_pilot_length_must_exist():
    with pytest.raises(ValueError, match="Hadamard"):
        SystemConfig(M=8, K=3, beta_SR=np.ones(3), beta_RD=np.ones(3),
                     pilot_kind="hadamard")


def test_est_variances_match_closed_forms():
    beta_SR = np.array([0.6, 0.3, 0.1, 0.9])
    beta_RD = np.array([0.2, 0.8, 0.5, 0.4])
    cfg = SystemConfig(M=16, K=4, beta_SR=beta_SR, beta_RD=beta_RD, p_p=3.0)
    v_sr, v_rd = est_variances(cfg)
    assert np.allclose(v_sr, sigma_identity(beta_SR, 4, 3.0))
    assert np.allclose(v_rd, sigma_identity(beta_RD, 4, 3.0))
    had = SystemConfig(M=16, K=4, beta_SR=beta_SR, beta_RD=beta_RD, p_p=3.0,
                       pilot_kind="hadamard")
    v_sr_h, _ = est_variances(had)
    expect = [kappa_hadamard(beta_SR, k, 4, 3.0) for k in range(4)]
    assert np.allclose(v_sr_h, expect)


def test_generate_channels_shapes_and_decomposition():
    cfg = SystemConfig(M=32, K=3, beta_SR=[0.5, 1.0, 0.2], beta_RD=[0.3, 0.6, 0.9])
    ch = generate_channels(cfg, make_rng(9))
    assert ch.G_SR.shape == (32, 3)
    assert ch.Ghat_RD.shape == (32, 3)
    assert np.allclose(ch.G_SR, ch.Ghat_SR + ch.E_SR)
    assert np.allclose(ch.G_RD, ch.Ghat_RD + ch.E_RD)


def test_generate_channels_column_variances():
    beta = np.array([0.5, 1.5])
    cfg = SystemConfig(M=4096, K=2, beta_SR=beta, beta_RD=beta, p_p=5.0)
    ch = generate_channels(cfg, make_rng(10))
    v_sr, _ = est_variances(cfg)
    est_power = np.mean(np.abs(ch.Ghat_SR) ** 2, axis=0)
    err_power = np.mean(np.abs(ch.E_SR) ** 2, axis=0)
    tot_power = np.mean(np.abs(ch.G_SR) ** 2, axis=0)
    assert np.allclose(est_power, v_sr, rtol=0.1)
    assert np.allclose(err_power, beta - v_sr, rtol=0.1)
    assert np.allclose(tot_power, beta, rtol=0.1)


def test_generate_channels_deterministic():
    cfg = SystemConfig(M=8, K=2, beta_SR=np.ones(2), beta_RD=np.ones(2))
    a = generate_channels(cfg, make_rng(4))
    b = generate_channels(cfg, make_rng(4))
    assert np.array_equal(a.G_SR, b.G_SR)
    assert np.array_equal(a.Ghat_RD, b.Ghat_RD)


def test_config_text_roundtrip(tmp_path):
    cfg = SystemConfig(M=96, K=3, beta_SR=[0.6, 0.3, 0.1], beta_RD=[0.2, 0.9, 0.4],
                       p_p=3.16, p_S=[1.0, 2.0, 0.5], p_R=2.0, tau_c=240,
                       pilot_kind="identity")
    back = SystemConfig.from_text(cfg.to_text())
    assert back.to_text() == cfg.to_text()
    assert np.array_equal(back.beta_SR, cfg.beta_SR)
    assert np.array_equal(back.p_S, cfg.p_S)
    assert (back.M, back.K, back.tau_c, back.tau_p) == (96, 3, 240, 3)
    path = tmp_path / "cfg.txt"
    write_config(cfg, path)
    assert read_config(path).to_text() == cfg.to_text()


def test_config_from_text_rejects_unknown_key():
    with pytest.raises(ValueError, match="unknown config key"):
        SystemConfig.from_text("M=4\nK=2\nwavelength=0.1\n")


def test_geometry_produces_valid_coefficients():
    beta_SR, beta_RD = large_scale_from_geometry(make_rng(2), 50)
    assert beta_SR.shape == (50,)
    assert np.all(beta_SR > 0) and np.all(beta_RD > 0)
    # a user at the guard distance with no shadowing has beta = 1; most of
    # the disc lies far out, so the bulk must sit well below that
    assert np.median(beta_SR) < 1.0


def test_geometry_decays_with_distance():
    # without shadowing, beta = (r / guard)^(-exponent) is bounded by the
    # annulus edges, and a steeper exponent shrinks every coefficient drawn
    # from the same positions
    kwargs = dict(K=400, radius_m=1000.0, guard_m=100.0, shadow_sigma_dB=0.0)
    mild, _ = large_scale_from_geometry(make_rng(3), exponent=2.0, **kwargs)
    steep, _ = large_scale_from_geometry(make_rng(3), exponent=3.8, **kwargs)
    for beta in (mild, steep):
        assert np.all(beta <= 1.0 + 1e-12)
        assert np.all(beta >= 10.0**-3.8 - 1e-12)
    assert np.all(steep <= mild)
    assert np.median(steep) < np.median(mild)


def test_geometry_rejects_bad_radii():
    with pytest.raises(ValueError):
        large_scale_from_geometry(make_rng(0), 3, radius_m=50.0, guard_m=100.0)
