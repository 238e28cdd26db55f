r"""Monte-Carlo achievable rates through the quantized relaying chain.

One coherence interval works like this: the K sources transmit, the relay
receives y = G_SR diag(sqrt(p_S)) s + n through one-bit ADCs, applies the
estimate-based beamformer W = conj(Ghat_RD) Ghat_SR^H, re-quantizes through
one-bit DACs, and forwards with gain gamma = sqrt(p_R / M) (each DAC output
has unit modulus, so the transmit power constraint is met exactly, not just
on average).

Rates are evaluated with the worst-case-Gaussian-noise bound.  The
expectation over signal and noise inside every SINR term is analytic (the
Bussgang statistics of both converter banks are exact arcsine-law quantities
per realization); only the channel average is Monte-Carlo.  The exact
evaluator keeps the full covariance of both quantization-noise sources; the
approximate evaluator replaces them with their diagonal large-M surrogates,
which is the same simplification the closed form rests on, so the two should
agree within Monte-Carlo error.

Per-user SINR from trial-averaged terms:

    SINR_k = signal_k / (est_error_k + interference_k + relay_noise_k
                         + adc_noise_k + dac_noise_k + 1/gamma_sq)
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet, SystemConfig, est_variances, generate_channels
from .numerics import Rng, complex_gaussian, make_rng
from .quantizer import QuantizerStats, one_bit_quantize, quantizer_stats
from .rate_closed import ONE_BIT, RateReport

TWO_OVER_PI = 2.0 / np.pi


@dataclass
class RateTerms:
    """Trial-averaged SINR term powers, one entry per user.

    gamma_sq is the squared gain between the normalized forwarded signal and
    the destination (the relay gain p_R / M times any scalar converter gains
    not already inside the term paths); the destination noise enters the
    SINR denominator as 1/gamma_sq.
    """

    signal: np.ndarray
    est_error: np.ndarray
    interference: np.ndarray
    relay_noise: np.ndarray
    adc_noise: np.ndarray
    dac_noise: np.ndarray
    gamma_sq: float

    def sinr(self) -> np.ndarray:
        denom = (
            self.est_error
            + self.interference
            + self.relay_noise
            + self.adc_noise
            + self.dac_noise
            + 1.0 / self.gamma_sq
        )
        return self.signal / denom


@dataclass
class ChainStats:
    """Analytic second-order statistics of one relaying-chain realization.

    All matrices are M x M.  dac_output_power is a sampled symbol-level check
    of E{||transmit vector||^2} (present only when the caller asked for
    symbol sampling); it equals M up to sampling noise because every one-bit
    DAC output has unit modulus.
    """

    R_yy: np.ndarray
    adc: QuantizerStats
    W: np.ndarray
    R_xx: np.ndarray
    dac: QuantizerStats
    gamma: float
    dac_output_power: float | None = None


def relay_chain_once(
    channels: ChannelSet,
    config: SystemConfig,
    rng: Rng | None = None,
    n_symbols: int = 0,
) -> ChainStats:
    """Second-order statistics of the full quantized chain for one realization.

    The DAC input covariance W R_rr W^H is assembled through K-sized inner
    products (the beamformer has rank K), so the cost stays at O(M^2 K).
    Passing an rng with n_symbols > 0 additionally pushes sampled symbols
    through the chain to measure the transmit power empirically.
    """
    M = config.M
    R_yy = (channels.G_SR * config.p_S) @ channels.G_SR.conj().T + np.eye(M)
    adc = quantizer_stats(R_yy)
    W = np.conj(channels.Ghat_RD) @ channels.Ghat_SR.conj().T
    inner = channels.Ghat_SR.conj().T @ adc.output_cov @ channels.Ghat_SR
    R_xx = np.conj(channels.Ghat_RD) @ inner @ channels.Ghat_RD.T
    dac = quantizer_stats(R_xx)
    gamma = np.sqrt(config.p_R / M)

    dac_output_power = None
    if rng is not None and n_symbols > 0:
        s = complex_gaussian(rng, (config.K, n_symbols))
        noise = complex_gaussian(rng, (M, n_symbols))
        y = channels.G_SR @ (np.sqrt(config.p_S)[:, np.newaxis] * s) + noise
        x = W @ one_bit_quantize(y)
        transmitted = one_bit_quantize(x)
        dac_output_power = float(np.mean(np.sum(np.abs(transmitted) ** 2, axis=0)))
    return ChainStats(
        R_yy=R_yy,
        adc=adc,
        W=W,
        R_xx=R_xx,
        dac=dac,
        gamma=gamma,
        dac_output_power=dac_output_power,
    )


def _real_quadratic(values: np.ndarray, what: str) -> np.ndarray:
    """Real part of a mathematically real quadratic form, with residue check."""
    scale = max(1.0, float(np.abs(values.real).max()))
    resid = float(np.abs(values.imag).max())
    assert resid < 1e-8 * scale, f"{what} has imaginary residue {resid:g}"
    return values.real


class _TermAccumulator:
    """Stacks per-trial term contributions and reduces them by jackknife.

    The SINR uses ratios of expectations, so terms are averaged over all
    trials before assembly.  Because the assembly is nonlinear, the plug-in
    estimate carries an O(1/trials) curvature bias and its dispersion is not
    directly observable; the leave-one-out jackknife removes the former and
    estimates the latter with trials-1 degrees of freedom, which keeps the
    reported standard errors stable enough to gate on.
    """

    def __init__(self, K: int):
        self.u = []
        self.u_sq = []
        self.cross = []
        self.relay_noise = []
        self.adc_noise = []
        self.dac_noise = []
        self.K = K

    def add(self, u, cross, relay_noise, adc_noise, dac_noise):
        self.u.append(u)
        self.u_sq.append(np.abs(u) ** 2)
        self.cross.append(cross)
        self.relay_noise.append(relay_noise)
        self.adc_noise.append(adc_noise)
        self.dac_noise.append(dac_noise)

    def _terms(
        self, u_mean, u_sq_mean, cross_mean, relay_noise, adc_noise, dac_noise,
        p: np.ndarray, gamma_sq: float,
    ) -> RateTerms:
        signal = p * np.abs(u_mean) ** 2
        est_error = p * np.maximum(u_sq_mean - np.abs(u_mean) ** 2, 0.0)
        weighted = cross_mean * p
        interference = weighted.sum(axis=-1) - np.diagonal(
            weighted, axis1=-2, axis2=-1
        )
        return RateTerms(
            signal=signal,
            est_error=est_error,
            interference=interference,
            relay_noise=relay_noise,
            adc_noise=adc_noise,
            dac_noise=dac_noise,
            gamma_sq=gamma_sq,
        )

    def reduce(
        self,
        config: SystemConfig,
        method: str,
        include_prefactor: bool,
        gamma_sq: float,
    ):
        trials = len(self.u)
        pref = config.rate_prefactor() if include_prefactor else 1.0
        p = config.p_S
        # np.stack(...).sum reduces pairwise, keeping accumulation error
        # flat in trials
        stacks = [
            np.stack(a)
            for a in (
                self.u, self.u_sq, self.cross,
                self.relay_noise, self.adc_noise, self.dac_noise,
            )
        ]
        terms = self._terms(*(a.sum(axis=0) / trials for a in stacks), p, gamma_sq)
        plug_in = pref * np.log2(1.0 + terms.sinr())

        if trials >= 2:
            loo = (
                self._terms(
                    *((a.sum(axis=0) - a) / (trials - 1) for a in stacks),
                    p, gamma_sq,
                )
            )
            loo_rates = pref * np.log2(1.0 + loo.sinr())
            loo_mean = loo_rates.mean(axis=0)
            rates = trials * plug_in - (trials - 1) * loo_mean
            std_err = np.sqrt(
                (trials - 1) / trials
                * ((loo_rates - loo_mean) ** 2).sum(axis=0)
            )
        else:
            rates = plug_in
            std_err = np.zeros(config.K)
        report = RateReport(
            per_user_rate=rates,
            sum_rate=float(rates.sum()),
            method=method,
            hw_case=ONE_BIT,
            trials=trials,
            std_err=std_err,
        )
        return report, terms


def exact_rate_mc(
    config: SystemConfig,
    trials: int = 1000,
    rng: Rng | None = None,
    include_prefactor: bool = True,
    return_terms: bool = False,
):
    """Rate with the full per-realization quantization-noise covariances.

    Every trial draws a channel set, runs the chain statistics, and extracts
    the per-user term contributions with the exact arcsine-law covariances at
    both converter banks.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = make_rng(0) if rng is None else rng
    acc = _TermAccumulator(config.K)
    for _ in range(trials):
        ch = generate_channels(config, rng)
        stats = relay_chain_once(ch, config)
        a_a = stats.adc.gain
        a_d = stats.dac.gain
        # receive path after both gains: G_RD^T A_d W A_a G_SR; the ADC
        # distortion is injected after the receive gain, so its path misses
        # the A_a factor
        U2 = (ch.G_RD.T * a_d[np.newaxis, :]) @ stats.W
        V = U2 * a_a[np.newaxis, :]
        U = V @ ch.G_SR
        u = np.diag(U).copy()
        cross = np.abs(U) ** 2
        relay_noise = _real_quadratic(
            np.einsum("km,km->k", V, np.conj(V)), "relay-noise term"
        )
        adc_noise = _real_quadratic(
            np.einsum("km,mn,kn->k", U2, stats.adc.noise_cov, np.conj(U2)),
            "ADC-noise term",
        )
        dac_noise = _real_quadratic(
            np.einsum(
                "mk,mn,nk->k", ch.G_RD, stats.dac.noise_cov, np.conj(ch.G_RD)
            ),
            "DAC-noise term",
        )
        acc.add(u, cross, relay_noise, adc_noise, dac_noise)
    # converter gains are already inside the accumulated paths, so the
    # destination-noise term is exactly M/p_R
    report, terms = acc.reduce(
        config, "exact-mc", include_prefactor, gamma_sq=config.p_R / config.M
    )
    return (report, terms) if return_terms else report


def approx_rate_mc(
    config: SystemConfig,
    trials: int = 1000,
    rng: Rng | None = None,
    include_prefactor: bool = True,
    return_terms: bool = False,
):
    """Rate with diagonal large-M surrogates for the converter statistics.

    The ADC gain becomes the scalar alpha_a with white distortion, and
    likewise for the DAC, so every term reduces to K x K Gram products and
    the per-trial cost drops to O(M K^2).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = make_rng(0) if rng is None else rng
    p = config.p_S
    v_sr, v_rd = est_variances(config)
    P = 1.0 + np.sum(p * config.beta_SR)
    alpha_a_sq = TWO_OVER_PI / P
    dac_input = config.M * np.sum(v_sr * v_rd) + (
        TWO_OVER_PI * config.M**2 * np.sum(p * v_sr**2 * v_rd) / P
    )
    alpha_d_sq = TWO_OVER_PI / dac_input

    acc = _TermAccumulator(config.K)
    for _ in range(trials):
        ch = generate_channels(config, rng)
        front = ch.G_RD.T @ np.conj(ch.Ghat_RD)
        back = ch.Ghat_SR.conj().T @ ch.G_SR
        U = front @ back
        u = np.diag(U).copy()
        cross = np.abs(U) ** 2
        gram_sr = ch.Ghat_SR.conj().T @ ch.Ghat_SR
        relay_noise = _real_quadratic(
            np.einsum("ki,ij,kj->k", front, gram_sr, np.conj(front)),
            "relay-noise term",
        )
        adc_noise = (1.0 - TWO_OVER_PI) / alpha_a_sq * relay_noise
        dac_noise = (
            (1.0 - TWO_OVER_PI)
            / (alpha_a_sq * alpha_d_sq)
            * np.sum(np.abs(ch.G_RD) ** 2, axis=0)
        )
        acc.add(u, cross, relay_noise, adc_noise, dac_noise)

    # these paths carry no converter gains, so the scalar gains fold into
    # the destination-noise normalization instead
    report, terms = acc.reduce(
        config,
        "approx-mc",
        include_prefactor,
        gamma_sq=(config.p_R / config.M) * alpha_a_sq * alpha_d_sq,
    )
    return (report, terms) if return_terms else report
