# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled quantizer-statistics kernel.

Single fused pass over the input covariance: normalization, clipped arcsine,
and noise-covariance assembly without intermediate full-size temporaries.
Semantics match ``_kernels_np.arcsine_stats`` exactly.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport asin, sqrt, M_PI

cnp.import_array()


def arcsine_stats(cnp.complex128_t[:, ::1] R not None, double tol=1e-9):
    """Fused arcsine-law statistics of a one-bit quantizer.

    Returns ``(gain, R_rr, R_qq)`` for the Hermitian input covariance ``R``;
    see the NumPy twin for the definitions.
    """
    cdef Py_ssize_t n = R.shape[0]
    if R.shape[1] != n:
        raise ValueError("covariance must be square")
    cdef double two_over_pi = 2.0 / M_PI
    cdef double sq = sqrt(two_over_pi)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gain = np.empty(n)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] R_rr = np.empty((n, n), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] R_qq = np.empty((n, n), dtype=np.complex128)
    cdef double[::1] d = np.empty(n)
    cdef cnp.complex128_t[:, ::1] rr = R_rr
    cdef cnp.complex128_t[:, ::1] qq = R_qq
    cdef Py_ssize_t i, j
    cdef double re, im, lim, rr_re, rr_im, dii

    for i in range(n):
        dii = R[i, i].real
        if dii <= 0.0:
            raise ValueError(f"covariance diagonal entry {i} is not positive")
        d[i] = 1.0 / sqrt(dii)
        gain[i] = sq * d[i]

    lim = 1.0 + tol
    for i in range(n):
        rr[i, i] = 1.0
        qq[i, i] = 1.0 - two_over_pi
        for j in range(i + 1, n):
            # Hermitian input assumed: read the upper entry, mirror conjugates
            re = R[i, j].real * d[i] * d[j]
            im = R[i, j].imag * d[i] * d[j]
            if re > lim or re < -lim or im > lim or im < -lim:
                raise ValueError(
                    f"normalized correlation magnitude at ({i},{j}) exceeds 1 + {tol:g}"
                )
            if re > 1.0:
                re = 1.0
            elif re < -1.0:
                re = -1.0
            if im > 1.0:
                im = 1.0
            elif im < -1.0:
                im = -1.0
            rr_re = two_over_pi * asin(re)
            rr_im = two_over_pi * asin(im)
            rr[i, j].real = rr_re
            rr[i, j].imag = rr_im
            rr[j, i].real = rr_re
            rr[j, i].imag = -rr_im
            qq[i, j].real = rr_re - two_over_pi * re
            qq[i, j].imag = rr_im - two_over_pi * im
            qq[j, i].real = rr_re - two_over_pi * re
            qq[j, i].imag = -(rr_im - two_over_pi * im)

    return gain, R_rr, R_qq
