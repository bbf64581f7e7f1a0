# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled running-bound kernels. Same contract as ``qsv._kernels_py``."""
import numpy as np

from libc.math cimport INFINITY, NAN, exp, expm1, log

DEF MAX_ITER = 200


cdef inline double _xlogy(double x, double ratio) noexcept nogil:
    if x == 0.0:
        return 0.0
    return x * log(ratio)


cdef inline double _log_delta(long n, double x, double y) noexcept nogil:
    cdef double d
    if y <= 0.0:
        return -INFINITY if x > 0.0 else 0.0
    if x == 1.0:
        return n * log(y)
    d = _xlogy(x, x / y) + _xlogy(1.0 - x, (1.0 - x) / (1.0 - y))
    if d < 0.0:
        d = 0.0
    return -n * d


cdef double _epsilon(long n, long m, double target, double f) noexcept nogil:
    """NaN marks an inconclusive step."""
    cdef double x, lo, hi, mid, eps
    cdef int it
    if m == n:
        eps = -expm1(target / n) / f
    else:
        x = <double>m / <double>n
        lo = (1.0 - x) / f
        hi = 1.0 / f
        if hi > 1.0:
            hi = 1.0
        if lo >= hi or _log_delta(n, x, 1.0 - f * hi) > target:
            return NAN
        for it in range(MAX_ITER):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _log_delta(n, x, 1.0 - f * mid) > target:
                lo = mid
            else:
                hi = mid
        eps = hi
    if eps >= 1.0:
        return NAN
    return eps


def running_delta(const unsigned char[::1] accepts, double epsilon, double f):
    cdef Py_ssize_t i, size = accepts.shape[0]
    cdef long m = 0
    cdef double x, y = 1.0 - f * epsilon, d
    m_out = np.empty(size, dtype=np.int64)
    bound = np.empty(size, dtype=np.float64)
    flag = np.zeros(size, dtype=np.uint8)
    cdef long long[::1] mv = m_out
    cdef double[::1] bv = bound
    cdef unsigned char[::1] fv = flag
    with nogil:
        for i in range(size):
            m += accepts[i]
            mv[i] = m
            x = <double>m / <double>(i + 1)
            if x < y:
                bv[i] = NAN
                fv[i] = 1
            else:
                d = exp(_log_delta(i + 1, x, y))
                bv[i] = d if d < 1.0 else 1.0
    return m_out, bound, flag.astype(bool)


def running_epsilon(const unsigned char[::1] accepts, double delta, double f):
    cdef Py_ssize_t i, size = accepts.shape[0]
    cdef long m = 0
    cdef double target = log(delta), e
    m_out = np.empty(size, dtype=np.int64)
    bound = np.empty(size, dtype=np.float64)
    flag = np.zeros(size, dtype=np.uint8)
    cdef long long[::1] mv = m_out
    cdef double[::1] bv = bound
    cdef unsigned char[::1] fv = flag
    with nogil:
        for i in range(size):
            m += accepts[i]
            mv[i] = m
            e = _epsilon(i + 1, m, target, f)
            bv[i] = e
            if e != e:
                fv[i] = 1
    return m_out, bound, flag.astype(bool)
