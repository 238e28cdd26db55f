r"""Scenario configuration, large-scale fading, and channel generation.

A scenario is M relay antennas serving K source/destination pairs over
uncorrelated Rayleigh fading.  Rate simulations draw the channel estimate and
estimation error directly from the closed-form pilot statistics (column k of
Ghat is CN(0, est_var_k I), the error column is CN(0, (beta_k - est_var_k) I),
and their sum has the true per-coefficient variance beta_k) rather than
running the pilot pipeline per trial, which would build MK x MK matrices at
large M for no statistical difference.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import estimation
from .numerics import Rng, complex_gaussian

_VECTOR_FIELDS = ("p_S", "beta_SR", "beta_RD")
_INT_FIELDS = ("M", "K", "tau_c", "tau_p")


@dataclass
class SystemConfig:
    """Complete description of one relaying scenario.

    p_S is per-source transmit power (scalars broadcast to all K sources);
    powers are normalized SNRs, not dB.  tau_p defaults to K, the minimum
    pilot length, and tau_c to 200 symbols.
    """

    M: int
    K: int
    beta_SR: np.ndarray
    beta_RD: np.ndarray
    p_p: float = 10.0
    p_S: np.ndarray = 1.0
    p_R: float = 1.0
    tau_c: int = 200
    tau_p: int | None = None
    pilot_kind: str = estimation.IDENTITY

    def __post_init__(self):
        self.M = int(self.M)
        self.K = int(self.K)
        self.beta_SR = np.atleast_1d(np.asarray(self.beta_SR, dtype=float))
        self.beta_RD = np.atleast_1d(np.asarray(self.beta_RD, dtype=float))
        self.p_S = np.broadcast_to(
            np.asarray(self.p_S, dtype=float), (self.K,)
        ).copy()
        self.p_p = float(self.p_p)
        self.p_R = float(self.p_R)
        if self.tau_p is None:
            self.tau_p = self.K
        self.tau_p = int(self.tau_p)
        self.tau_c = int(self.tau_c)
        if self.M < 1 or self.K < 1:
            raise ValueError("M and K must be positive")
        for name in ("beta_SR", "beta_RD"):
            b = getattr(self, name)
            if b.shape != (self.K,):
                raise ValueError(f"{name} must have length K={self.K}")
            if np.any(b <= 0):
                raise ValueError(f"{name} entries must be positive")
        if self.p_p < 0 or self.p_R < 0 or np.any(self.p_S < 0):
            raise ValueError("powers must be nonnegative")
        if self.tau_p < self.K:
            raise ValueError(f"tau_p={self.tau_p} must be at least K={self.K}")
        if self.tau_c <= 2 * self.tau_p:
            raise ValueError(
                f"tau_c={self.tau_c} must exceed 2*tau_p={2 * self.tau_p}"
            )
        if self.pilot_kind not in estimation.PILOT_KINDS:
            raise ValueError(f"unknown pilot kind {self.pilot_kind!r}")
        if self.pilot_kind == estimation.HADAMARD:
            if not (self.tau_p in (1, 2) or self.tau_p % 4 == 0):
                raise ValueError(
                    f"no Hadamard matrix of order {self.tau_p} exists"
                )

    def rate_prefactor(self) -> float:
        """Fraction of the coherence block left for payload: (tau_c - 2 tau_p)/(2 tau_c)."""
        return (self.tau_c - 2 * self.tau_p) / (2.0 * self.tau_c)

    def to_text(self) -> str:
        """Serialize to flat key=value lines; vectors are comma-separated."""
        buf = io.StringIO()
        for name in ("M", "K", "tau_c", "tau_p"):
            buf.write(f"{name}={getattr(self, name)}\n")
        for name in ("p_p", "p_R"):
            buf.write(f"{name}={getattr(self, name)!r}\n")
        for name in _VECTOR_FIELDS:
            buf.write(f"{name}={','.join(repr(float(v)) for v in getattr(self, name))}\n")
        buf.write(f"pilot_kind={self.pilot_kind}\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "SystemConfig":
        kwargs = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key in _VECTOR_FIELDS:
                kwargs[key] = np.array([float(v) for v in value.split(",")])
            elif key in _INT_FIELDS:
                kwargs[key] = int(value)
            elif key == "pilot_kind":
                kwargs[key] = value
            elif key in ("p_p", "p_R"):
                kwargs[key] = float(value)
            else:
                raise ValueError(f"unknown config key {key!r}")
        return cls(**kwargs)


def write_config(config: SystemConfig, path) -> None:
    with open(path, "w") as f:
        f.write(config.to_text())


def read_config(path) -> SystemConfig:
    with open(path) as f:
        return SystemConfig.from_text(f.read())


@dataclass
class ChannelSet:
    """One realization of both hops with its LMMSE decomposition.

    Matrices are M x K with users in columns; G = Ghat + E columnwise and the
    two parts are independent by LMMSE orthogonality.
    """

    G_SR: np.ndarray
    G_RD: np.ndarray
    Ghat_SR: np.ndarray
    Ghat_RD: np.ndarray
    E_SR: np.ndarray
    E_RD: np.ndarray
    est_var_SR: np.ndarray
    est_var_RD: np.ndarray


def est_variances(config: SystemConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-user estimate variances (both hops) for the configured pilot kind."""
    s_SR = estimation.estimation_stats(
        config.pilot_kind, config.beta_SR, config.K, config.p_p
    ).est_var
    s_RD = estimation.estimation_stats(
        config.pilot_kind, config.beta_RD, config.K, config.p_p
    ).est_var
    return s_SR, s_RD


def generate_channels(config: SystemConfig, rng: Rng) -> ChannelSet:
    """Draw one channel realization with estimates from closed-form statistics."""
    s_SR, s_RD = est_variances(config)
    Ghat_SR = complex_gaussian(rng, (config.M, config.K)) * np.sqrt(s_SR)
    Ghat_RD = complex_gaussian(rng, (config.M, config.K)) * np.sqrt(s_RD)
    E_SR = complex_gaussian(rng, (config.M, config.K)) * np.sqrt(config.beta_SR - s_SR)
    E_RD = complex_gaussian(rng, (config.M, config.K)) * np.sqrt(config.beta_RD - s_RD)
    return ChannelSet(
        G_SR=Ghat_SR + E_SR,
        G_RD=Ghat_RD + E_RD,
        Ghat_SR=Ghat_SR,
        Ghat_RD=Ghat_RD,
        E_SR=E_SR,
        E_RD=E_RD,
        est_var_SR=s_SR,
        est_var_RD=s_RD,
    )


def large_scale_from_geometry(
    rng: Rng,
    K: int,
    radius_m: float = 1000.0,
    guard_m: float = 100.0,
    exponent: float = 3.8,
    shadow_sigma_dB: float = 8.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw large-scale coefficients from a disc deployment around the relay.

    Sources and destinations land uniformly in the annulus between guard_m
    and radius_m; beta = z (r / guard_m)^(-exponent) with shadowing z
    log-normal of the given dB standard deviation, shared per pair between
    the two hops.  The exponent is applied with a negative sign so beta
    decreases with distance.
    """
    if not radius_m > guard_m > 0:
        raise ValueError("need radius_m > guard_m > 0")
    z = 10.0 ** (shadow_sigma_dB * rng.standard_normal(K) / 10.0)

    def draw_r():
        u = rng.uniform(size=K)
        return np.sqrt(guard_m**2 + u * (radius_m**2 - guard_m**2))

    beta_SR = z * (draw_r() / guard_m) ** (-exponent)
    beta_RD = z * (draw_r() / guard_m) ** (-exponent)
    return beta_SR, beta_RD
