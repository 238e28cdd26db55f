r"""Pilot construction and LMMSE channel estimation through one-bit ADCs.

Pilots of length tau_p = K are either a scaled identity (users sound one at a
time) or a Hadamard matrix (all users sound simultaneously).  The received
pilot block passes through one-bit converters, so the estimator is the linear
MMSE filter built from the Bussgang-linearized statistics.  Closed forms for
the per-user estimate variance exist for both pilot kinds:

    identity:  sigma^2 = (2/pi) K p_p beta^2 / (K p_p beta + 1)
    Hadamard:  kappa^2 = K a^2 beta^2 p_p / (K a^2 beta p_p + a^2 + 1 - 2/pi),
               a^2 = (2/pi) / (p_p sum(beta) + 1)

The Hadamard form treats the quantization noise as white, which is accurate
at low pilot power; the general estimator (exact arcsine-law statistics) is
available for cross-checking.  Error variance per coefficient is beta minus
the estimate variance, which also equals the per-coefficient MSE.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import hermitian_solve
from .quantizer import one_bit_quantize, quantizer_stats

TWO_OVER_PI = 2.0 / np.pi

IDENTITY = "identity"
HADAMARD = "hadamard"
PILOT_KINDS = (IDENTITY, HADAMARD)


@dataclass
class EstimationStats:
    """Per-user second-order estimation quality for one pilot kind.

    est_var is the variance of each estimated coefficient, err_var = beta -
    est_var is the variance of the estimation error, and mse equals err_var.
    """

    est_var: np.ndarray
    err_var: np.ndarray
    mse: np.ndarray


def build_pilot(kind: str, K: int) -> np.ndarray:
    """Return a tau_p x K pilot matrix with tau_p = K and Phi^H Phi = K I.

    The identity kind is sqrt(K) I_K.  The Hadamard kind uses Sylvester
    doubling, so K must be a power of two; other orders are unsupported.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    if kind == IDENTITY:
        return np.sqrt(K) * np.eye(K)
    if kind == HADAMARD:
        if K & (K - 1) != 0:
            raise ValueError(
                f"no Hadamard pilot of order {K}: only powers of two are supported"
            )
        H = np.ones((1, 1))
        while H.shape[0] < K:
            H = np.block([[H, H], [H, -H]])
        return H
    raise ValueError(f"unknown pilot kind {kind!r}")


def lmmse_cov_general(pilot: np.ndarray, betas, p_p: float, M: int = 1) -> np.ndarray:
    """K x K covariance factor of the LMMSE estimate through one-bit ADCs.

    The received pilot block has per-antenna covariance S = p_p Phi D Phi^H +
    I with D = diag(betas), and the stacked estimate covariance factors as
    Q kron I_M, so the K x K factor Q is computed once at M = 1 and holds for
    every antenna count.  Q is diagonal for identity pilots and matches the
    sigma_identity closed form exactly; for Hadamard pilots its diagonal is
    the exact counterpart of the kappa_hadamard approximation.
    """
    pilot = np.asarray(pilot, dtype=np.complex128)
    betas = np.asarray(betas, dtype=float)
    if pilot.shape[1] != betas.size:
        raise ValueError("pilot column count must match number of users")
    if p_p == 0.0:
        return np.zeros((betas.size, betas.size), dtype=np.complex128)
    D = np.diag(betas)
    S = p_p * pilot @ D @ pilot.conj().T + np.eye(pilot.shape[0])
    stats = quantizer_stats(S)
    # cross-covariance of g with the quantized output: D Phi'^H A with
    # Phi' = sqrt(p_p) Phi and A the diagonal Bussgang gain
    C = np.sqrt(p_p) * (D @ pilot.conj().T) * stats.gain[np.newaxis, :]
    return C @ hermitian_solve(stats.output_cov, C.conj().T)


def sigma_identity(beta, K: int, p_p: float):
    """Estimate variance per coefficient for identity pilots, one-bit ADCs.

    Accepts a scalar or a vector of large-scale coefficients.  Increasing in
    p_p with supremum (2/pi) beta.
    """
    beta = np.asarray(beta, dtype=float)
    out = TWO_OVER_PI * K * p_p * beta**2 / (K * p_p * beta + 1.0)
    return out if out.ndim else float(out)


def sigma_unquantized(beta, K: int, p_p: float):
    """Estimate variance with full-resolution ADCs; equals (pi/2) sigma_identity."""
    beta = np.asarray(beta, dtype=float)
    out = K * p_p * beta**2 / (K * p_p * beta + 1.0)
    return out if out.ndim else float(out)


def kappa_hadamard(betas, k: int, K: int, p_p: float) -> float:
    """Estimate variance of user k's coefficients for Hadamard pilots.

    Uses the white-quantization-noise approximation, accurate at low p_p.
    """
    betas = np.asarray(betas, dtype=float)
    if betas.size != K:
        raise ValueError("betas must have length K")
    beta = betas[k]
    a_sq = TWO_OVER_PI / (p_p * betas.sum() + 1.0)
    return float(
        K * a_sq * beta**2 * p_p / (K * a_sq * beta * p_p + a_sq + 1.0 - TWO_OVER_PI)
    )


def estimation_stats(kind: str, betas, K: int, p_p: float) -> EstimationStats:
    """Closed-form per-user estimate/error variances for the given pilot kind."""
    betas = np.asarray(betas, dtype=float)
    if kind == IDENTITY:
        est = sigma_identity(betas, K, p_p)
    elif kind == HADAMARD:
        est = np.array([kappa_hadamard(betas, k, K, p_p) for k in range(K)])
    else:
        raise ValueError(f"unknown pilot kind {kind!r}")
    err = betas - est
    return EstimationStats(est_var=est, err_var=err, mse=err)


def compare_pilots(betas, K: int, p_p: float) -> list[str]:
    """Preferred pilot kind per user, by closed-form MSE.

    Returns "identity", "hadamard", or "tie" for each user.  Identity wins
    exactly when the user's large-scale coefficient is below the average, so
    weak users prefer time-orthogonal sounding.
    """
    mse_i = estimation_stats(IDENTITY, betas, K, p_p).mse
    mse_h = estimation_stats(HADAMARD, betas, K, p_p).mse
    out = []
    for i, h in zip(mse_i, mse_h):
        if abs(i - h) <= 1e-12:
            out.append("tie")
        elif i < h:
            out.append(IDENTITY)
        else:
            out.append(HADAMARD)
    return out


def estimate_from_pilots(Y_p: np.ndarray, pilot: np.ndarray, betas, p_p: float) -> np.ndarray:
    """LMMSE channel estimate from a received (pre-quantization) pilot block.

    Quantizes the M x tau_p block with one-bit converters, then applies the
    Bussgang LMMSE filter row by row; rows are independent because the
    per-antenna pilot covariance is identical.  Used in validation
    experiments; rate simulations draw estimates from the closed-form
    statistics instead.
    """
    Y_p = np.asarray(Y_p, dtype=np.complex128)
    pilot = np.asarray(pilot, dtype=np.complex128)
    betas = np.asarray(betas, dtype=float)
    if Y_p.shape[1] != pilot.shape[0]:
        raise ValueError(
            f"received block has {Y_p.shape[1]} symbols but pilot length is {pilot.shape[0]}"
        )
    D = np.diag(betas)
    S = p_p * pilot @ D @ pilot.conj().T + np.eye(pilot.shape[0])
    stats = quantizer_stats(S)
    C = np.sqrt(p_p) * (D @ pilot.conj().T) * stats.gain[np.newaxis, :]
    T = hermitian_solve(stats.output_cov, C.conj().T)
    return one_bit_quantize(Y_p) @ np.conj(T)
