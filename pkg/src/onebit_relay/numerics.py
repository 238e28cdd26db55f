"""Complex-matrix and statistical primitives shared by the other modules.

Provides seeded random-number streams, circularly symmetric complex Gaussian
draws, Cholesky-backed Hermitian solves, and the clipped elementwise arcsine
used by the quantizer covariance laws.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import lapack

ARCSIN_CLIP_TOL = 1e-9

# Draw sequences are identified by a (seed, stream) pair; make_rng is the only
# constructor, so every consumer shares the same determinism contract.
Rng = np.random.Generator


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when a Cholesky factorization fails; carries the pivot index."""

    def __init__(self, pivot: int):
        self.pivot = pivot
        super().__init__(f"matrix is not positive definite (failed at pivot {pivot})")


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Return a Generator for the given (seed, stream) pair.

    Distinct stream ids under the same seed yield statistically independent
    sequences, so parallel workers can draw without coordination.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


def complex_gaussian(rng: np.random.Generator, shape, variance=1.0) -> np.ndarray:
    """Draw i.i.d. circularly symmetric complex Gaussian CN(0, variance) entries.

    Parameters
    ----------
    rng : np.random.Generator
    shape : int or tuple of int
    variance : float or array broadcastable to `shape`
        Per-entry variance, split equally between real and imaginary parts.

    Returns
    -------
    np.ndarray of complex128
    """
    variance = np.asarray(variance, dtype=float)
    if np.any(variance < 0):
        raise ValueError("variance must be nonnegative")
    scale = np.sqrt(variance / 2.0)
    if np.isscalar(shape):
        shape = (shape,)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return scale * z


def hermitian_solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve A X = B for Hermitian positive-definite A via Cholesky.

    Never forms A^{-1}; relative residual ||AX - B||_F / ||B||_F stays below
    1e-8 for well-scaled systems.

    Raises
    ------
    SingularMatrixError
        If the factorization fails; the exception carries the 1-based pivot
        index where positive definiteness broke down.
    """
    A = np.ascontiguousarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    c, info = lapack.zpotrf(A, lower=1)
    if info != 0:
        raise SingularMatrixError(int(info))
    b2d = B if B.ndim == 2 else B[:, None]
    x, info = lapack.zpotrs(c, b2d, lower=1)
    if info != 0:  # pragma: no cover - zpotrs only fails on bad arguments
        raise SingularMatrixError(int(abs(info)))
    return x if B.ndim == 2 else x[:, 0]


def arcsin_clipped(X, tol: float = ARCSIN_CLIP_TOL) -> np.ndarray:
    r"""Elementwise arcsin of entries expected in [-1, 1] up to round-off.

    Entries within `tol` of the interval are clipped to it; anything farther
    out signals that the input was not a normalized correlation matrix.
    """
    X = np.asarray(X, dtype=float)
    over = np.abs(X) > 1.0 + tol
    if np.any(over):
        idx = np.argwhere(over)[0]
        raise ValueError(
            f"arcsin input {X[tuple(idx)]:.12g} at index {tuple(idx)} exceeds 1 + {tol:g}"
        )
    return np.arcsin(np.clip(X, -1.0, 1.0))
