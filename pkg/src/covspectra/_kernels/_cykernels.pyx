# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled simulation kernels: Philox streams, polar normals, Jacobi sweeps.

Same contracts as ``_pykernels``; scalar C loops instead of vectorized NumPy.
"""

from libc.math cimport sqrt, log, fabs
from libc.stdint cimport uint32_t, uint64_t

import numpy as np

BACKEND_NAME = "cython"

cdef double INV53 = 1.0 / 9007199254740992.0  # 2**-53


cdef inline void _philox_block(uint64_t block, uint64_t stream,
                               uint32_t key0, uint32_t key1,
                               double* da, double* db) noexcept nogil:
    cdef uint32_t c0 = <uint32_t>(block & 0xFFFFFFFFu)
    cdef uint32_t c1 = <uint32_t>(block >> 32)
    cdef uint32_t c2 = <uint32_t>(stream & 0xFFFFFFFFu)
    cdef uint32_t c3 = <uint32_t>(stream >> 32)
    cdef uint32_t k0 = key0, k1 = key1
    cdef uint64_t p0, p1, ua, ub
    cdef uint32_t hi0, lo0, hi1, lo1, t0, t2
    cdef int r
    for r in range(10):
        p0 = (<uint64_t>0xD2511F53u) * c0
        p1 = (<uint64_t>0xCD9E8D57u) * c2
        hi0 = <uint32_t>(p0 >> 32)
        lo0 = <uint32_t>p0
        hi1 = <uint32_t>(p1 >> 32)
        lo1 = <uint32_t>p1
        t0 = hi1 ^ c1 ^ k0
        t2 = hi0 ^ c3 ^ k1
        c0 = t0
        c1 = lo1
        c2 = t2
        c3 = lo0
        k0 = k0 + 0x9E3779B9u
        k1 = k1 + 0xBB67AE85u
    ua = ((<uint64_t>c0) << 32) | c1
    ub = ((<uint64_t>c2) << 32) | c3
    da[0] = <double>(ua >> 11) * INV53
    db[0] = <double>(ub >> 11) * INV53


def uniforms(key0, key1, stream, count):
    """First `count` uniform [0,1) doubles of the (key, stream) Philox stream."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    cdef uint32_t k0 = <uint32_t>(key0 & 0xFFFFFFFF)
    cdef uint32_t k1 = <uint32_t>(key1 & 0xFFFFFFFF)
    cdef uint64_t sid = <uint64_t>stream
    cdef Py_ssize_t n = count
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double da, db
    cdef Py_ssize_t i
    cdef uint64_t block
    with nogil:
        for i in range(0, n, 2):
            block = <uint64_t>(i // 2)
            _philox_block(block, sid, k0, k1, &da, &db)
            out[i] = da
            if i + 1 < n:
                out[i + 1] = db
    return out_arr


def normals(key0, key1, stream, count):
    """First `count` standard normals via the polar (Marsaglia) method.

    Candidate pair j comes from Philox block j; accepted iff 0 < s < 1 with
    s = v1^2 + v2^2.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    cdef uint32_t k0 = <uint32_t>(key0 & 0xFFFFFFFF)
    cdef uint32_t k1 = <uint32_t>(key1 & 0xFFFFFFFF)
    cdef uint64_t sid = <uint64_t>stream
    cdef Py_ssize_t n = count
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double da, db, v1, v2, s, f
    cdef Py_ssize_t filled = 0
    cdef uint64_t block = 0
    with nogil:
        while filled < n:
            _philox_block(block, sid, k0, k1, &da, &db)
            block += 1
            v1 = 2.0 * da - 1.0
            v2 = 2.0 * db - 1.0
            s = v1 * v1 + v2 * v2
            if s >= 1.0 or s <= 0.0:
                continue
            f = sqrt(-2.0 * log(s) / s)
            out[filled] = v1 * f
            filled += 1
            if filled < n:
                out[filled] = v2 * f
                filled += 1
    return out_arr


def jacobi_eigenvalues(S, max_sweeps=100, rel_tol=1e-12):
    """Cyclic Jacobi eigenvalues of a symmetric matrix.

    Returns (descending eigenvalues, final off-diagonal Frobenius norm, sweeps).
    """
    A_arr = np.array(S, dtype=np.float64, copy=True, order="C")
    cdef double[:, ::1] A = A_arr
    cdef Py_ssize_t p = A.shape[0]
    cdef int sweeps = 0, max_sw = max_sweeps
    cdef double norm_f = 0.0, off, target, skip
    cdef Py_ssize_t i, k, l
    cdef double akk, all_, akl, theta, t, c, s, tau, aik, ail
    for k in range(p):
        for l in range(p):
            norm_f += A[k, l] * A[k, l]
    norm_f = sqrt(norm_f)
    if p == 1 or norm_f == 0.0:
        return np.sort(np.diag(A_arr))[::-1].copy(), 0.0, 0
    target = rel_tol * norm_f
    skip = target / (2.0 * p)
    with nogil:
        off = _offdiag_norm(A, p)
        while off >= target and sweeps < max_sw:
            for k in range(p - 1):
                for l in range(k + 1, p):
                    akl = A[k, l]
                    if fabs(akl) <= skip:
                        continue
                    akk = A[k, k]
                    all_ = A[l, l]
                    theta = 0.5 * (all_ - akk) / akl
                    if fabs(theta) > 1e154:
                        t = 0.5 / theta
                    else:
                        t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                        if theta < 0.0:
                            t = -t
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    tau = s / (1.0 + c)
                    for i in range(p):
                        if i == k or i == l:
                            continue
                        aik = A[i, k]
                        ail = A[i, l]
                        A[i, k] = aik - s * (ail + tau * aik)
                        A[k, i] = A[i, k]
                        A[i, l] = ail + s * (aik - tau * ail)
                        A[l, i] = A[i, l]
                    A[k, k] = akk - t * akl
                    A[l, l] = all_ + t * akl
                    A[k, l] = 0.0
                    A[l, k] = 0.0
            sweeps += 1
            off = _offdiag_norm(A, p)
    eigs = np.sort(np.diag(A_arr).copy())[::-1].copy()
    return eigs, off, sweeps


cdef double _offdiag_norm(double[:, ::1] A, Py_ssize_t p) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t k, l
    for k in range(p - 1):
        for l in range(k + 1, p):
            acc += A[k, l] * A[k, l]
    return sqrt(2.0 * acc)
