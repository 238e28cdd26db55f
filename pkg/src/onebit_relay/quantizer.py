r"""One-bit quantization, Bussgang linearization, and arcsine-law statistics.

A one-bit converter maps each complex sample to (sign(Re) + j sign(Im))/sqrt(2).
For a zero-mean Gaussian input y with covariance R_yy, the output decomposes as
Q(y) = A y + q with a diagonal gain A = sqrt(2/pi) diag(R_yy)^(-1/2) and
distortion q uncorrelated with y.  The quantized-output covariance follows the
arcsine law R_rr = (2/pi)(arcsin(J) + j arcsin(K)) where J and K are the
diagonally normalized real and imaginary parts of R_yy.

The heavy per-realization statistics run through a compiled kernel when the
extension built; set ONEBIT_RELAY_FORCE_NUMPY=1 to force the NumPy fallback.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

if os.environ.get("ONEBIT_RELAY_FORCE_NUMPY"):
    from . import _kernels_np as _impl

    _BACKEND = "numpy"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        _BACKEND = "compiled"
    except ImportError:
        from . import _kernels_np as _impl  # type: ignore[no-redef]

        _BACKEND = "numpy"

INV_SQRT2 = 1.0 / np.sqrt(2.0)
TWO_OVER_PI = 2.0 / np.pi


def backend_name() -> str:
    """Name of the kernel backend in use: "compiled" or "numpy"."""
    return _BACKEND


@dataclass
class QuantizerStats:
    """Second-order Bussgang statistics of a one-bit quantizer.

    gain holds the diagonal of the Bussgang gain matrix A (real, positive);
    output_cov is the quantized-output covariance R_rr (unit diagonal);
    noise_cov is the quantization-noise covariance R_qq = R_rr - A R_yy A^H.
    """

    gain: np.ndarray
    output_cov: np.ndarray
    noise_cov: np.ndarray


def one_bit_quantize(y) -> np.ndarray:
    """Apply the one-bit converter elementwise.

    Each entry maps into (1/sqrt(2)){+-1 +-1j} from the signs of its real and
    imaginary parts, with sign(0) := +1 so the map is total and deterministic.
    """
    y = np.asarray(y)
    re = np.where(y.real >= 0, 1.0, -1.0)
    im = np.where(y.imag >= 0, 1.0, -1.0)
    return INV_SQRT2 * (re + 1j * im)


def quantizer_stats(R_yy, tol: float = 1e-9) -> QuantizerStats:
    """Compute gain, output covariance, and noise covariance in one pass."""
    gain, R_rr, R_qq = _impl.arcsine_stats(
        np.ascontiguousarray(R_yy, dtype=np.complex128), tol
    )
    return QuantizerStats(gain=gain, output_cov=R_rr, noise_cov=R_qq)


def bussgang_gain(R_yy) -> np.ndarray:
    """Diagonal of the Bussgang gain, sqrt(2/pi) diag(R_yy)^(-1/2).

    Returned as a length-n vector (the matrix is diagonal; callers scale rows
    or columns by broadcasting).
    """
    diag = np.asarray(R_yy).diagonal().real
    if np.any(diag <= 0.0):
        i = int(np.argmax(diag <= 0.0))
        raise ValueError(f"covariance diagonal entry {i} is not positive")
    return np.sqrt(TWO_OVER_PI / diag)


def arcsine_output_cov(R_yy, tol: float = 1e-9) -> np.ndarray:
    """Covariance of the quantized output; unit diagonal by construction."""
    return quantizer_stats(R_yy, tol).output_cov


def quantization_noise_cov(R_yy, tol: float = 1e-9) -> QuantizerStats:
    """Bundle gain, R_rr, and R_qq = R_rr - A R_yy A^H for the input covariance."""
    return quantizer_stats(R_yy, tol)
