"""NumPy implementation of the quantizer-statistics kernel.

Mirrors the compiled extension in ``_kernels.pyx``; selected automatically
when the extension is unavailable (or forced via ONEBIT_RELAY_FORCE_NUMPY).
"""
from __future__ import annotations

import numpy as np

TWO_OVER_PI = 2.0 / np.pi


def arcsine_stats(R, tol: float = 1e-9):
    """Fused arcsine-law statistics of a one-bit quantizer.

    Given the Hermitian input covariance ``R``, returns the tuple
    ``(gain, R_rr, R_qq)``: the per-entry Bussgang gains
    sqrt(2/pi)/sqrt(diag R), the quantized-output covariance
    (2/pi)(arcsin J + j arcsin K) with unit diagonal, and the
    quantization-noise covariance ``R_rr - A R A``.
    """
    R = np.asarray(R, dtype=np.complex128)
    diag = R.diagonal().real
    if np.any(diag <= 0.0):
        i = int(np.argmax(diag <= 0.0))
        raise ValueError(f"covariance diagonal entry {i} is not positive")
    d = 1.0 / np.sqrt(diag)
    J = d[:, None] * R.real * d[None, :]
    K = d[:, None] * R.imag * d[None, :]
    # enforce exact Hermitian structure before the elementwise arcsine
    J = 0.5 * (J + J.T)
    K = 0.5 * (K - K.T)
    worst = max(np.abs(J).max(), np.abs(K).max())
    if worst > 1.0 + tol:
        raise ValueError(
            f"normalized correlation magnitude {worst:.12g} exceeds 1 + {tol:g}"
        )
    np.clip(J, -1.0, 1.0, out=J)
    np.clip(K, -1.0, 1.0, out=K)
    R_rr = TWO_OVER_PI * (np.arcsin(J) + 1j * np.arcsin(K))
    R_qq = R_rr - TWO_OVER_PI * (J + 1j * K)
    n = R.shape[0]
    idx = np.arange(n)
    R_rr[idx, idx] = 1.0
    R_qq[idx, idx] = 1.0 - TWO_OVER_PI
    gain = np.sqrt(TWO_OVER_PI) * d
    return gain, R_rr, R_qq
