"""NumPy implementations of the simulation hot kernels.

Mirror of the compiled backend in ``_cykernels``: the Philox4x32-10 streams
are bit-identical (pure integer arithmetic), the polar normal sequence agrees
up to libm rounding of ``log``, and the Jacobi sweeps agree to rounding
noise. Each backend is individually deterministic; cross-backend outputs may
differ in the last couple of ulps.
"""

import numpy as np

BACKEND_NAME = "python"

# Philox4x32 round constants (Random123).
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_MASK32 = 0xFFFFFFFF

_INV53 = 1.0 / 9007199254740992.0  # 2**-53
_SHIFT32 = np.uint64(32)
_SHIFT11 = np.uint64(11)


def _philox_doubles(key0, key1, stream, start, nblocks):
    """Philox4x32-10 on blocks [start, start+nblocks); two doubles per block.

    Returns (da, db): uniform [0,1) arrays built from the high/low output
    halves of each block. Pair j of the polar sampler is exactly block j.
    """
    idx = np.arange(start, start + nblocks, dtype=np.uint64)
    c0 = idx.astype(np.uint32)
    c1 = (idx >> _SHIFT32).astype(np.uint32)
    c2 = np.full(nblocks, stream & _MASK32, dtype=np.uint32)
    c3 = np.full(nblocks, (stream >> 32) & _MASK32, dtype=np.uint32)
    k0, k1 = key0 & _MASK32, key1 & _MASK32
    for _ in range(10):
        p0 = c0.astype(np.uint64) * _M0
        p1 = c2.astype(np.uint64) * _M1
        hi0 = (p0 >> _SHIFT32).astype(np.uint32)
        lo0 = p0.astype(np.uint32)
        hi1 = (p1 >> _SHIFT32).astype(np.uint32)
        lo1 = p1.astype(np.uint32)
        c0 = hi1 ^ c1 ^ np.uint32(k0)
        c1 = lo1
        c2 = hi0 ^ c3 ^ np.uint32(k1)
        c3 = lo0
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    ua = (c0.astype(np.uint64) << _SHIFT32) | c1.astype(np.uint64)
    ub = (c2.astype(np.uint64) << _SHIFT32) | c3.astype(np.uint64)
    da = (ua >> _SHIFT11).astype(np.float64) * _INV53
    db = (ub >> _SHIFT11).astype(np.float64) * _INV53
    return da, db


def uniforms(key0, key1, stream, count):
    """First `count` uniform [0,1) doubles of the (key, stream) Philox stream."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    nblocks = (count + 1) // 2
    da, db = _philox_doubles(key0, key1, stream, 0, nblocks)
    out = np.empty(2 * nblocks)
    out[0::2] = da
    out[1::2] = db
    return out[:count]


def normals(key0, key1, stream, count):
    """First `count` standard normals via the polar (Marsaglia) method.

    Candidate pair j comes from Philox block j; a pair is accepted iff
    0 < v1^2 + v2^2 < 1. Accepted pairs emit two normals in order, so the
    sequence is independent of batching.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    out = np.empty(count)
    filled = 0
    block = 0
    while filled < count:
        need_pairs = (count - filled + 1) // 2
        # 4/pi ~ 1.273 rejection overhead plus slack
        batch = max(256, int(need_pairs * 1.31) + 16)
        da, db = _philox_doubles(key0, key1, stream, block, batch)
        block += batch
        v1 = 2.0 * da - 1.0
        v2 = 2.0 * db - 1.0
        s = v1 * v1 + v2 * v2
        accept = (s < 1.0) & (s > 0.0)
        v1 = v1[accept]
        v2 = v2[accept]
        s = s[accept]
        f = np.sqrt(-2.0 * np.log(s) / s)
        pairs = np.empty(2 * s.size)
        pairs[0::2] = v1 * f
        pairs[1::2] = v2 * f
        take = min(pairs.size, count - filled)
        out[filled:filled + take] = pairs[:take]
        filled += take
    return out


def jacobi_eigenvalues(S, max_sweeps=100, rel_tol=1e-12):
    """Cyclic Jacobi eigenvalues of a symmetric matrix.

    Sweeps upper-triangle pivots, skipping entries below target/(2p) (a
    no-rotation sweep then already implies convergence). Returns
    (descending eigenvalues, final off-diagonal Frobenius norm, sweeps).
    """
    A = np.array(S, dtype=float, copy=True)
    p = A.shape[0]
    norm_f = float(np.sqrt((A * A).sum()))
    if p == 1 or norm_f == 0.0:
        return np.sort(np.diag(A))[::-1].copy(), 0.0, 0
    target = rel_tol * norm_f
    skip = target / (2.0 * p)
    sweeps = 0
    off = _offdiag_norm(A)
    while off >= target and sweeps < max_sweeps:
        for k in range(p - 1):
            for l in range(k + 1, p):
                if abs(A[k, l]) > skip:
                    _rotate(A, k, l)
        sweeps += 1
        off = _offdiag_norm(A)
    eigs = np.sort(np.diag(A).copy())[::-1].copy()
    return eigs, off, sweeps


def _offdiag_norm(A):
    return float(np.sqrt(2.0 * (np.triu(A, 1) ** 2).sum()))


def _rotate(A, k, l):
    akk = A[k, k]
    all_ = A[l, l]
    akl = A[k, l]
    theta = 0.5 * (all_ - akk) / akl
    if abs(theta) > 1e154:  # avoid theta**2 overflow
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    tau = s / (1.0 + c)
    col_k = A[:, k].copy()
    col_l = A[:, l].copy()
    new_k = col_k - s * (col_l + tau * col_k)
    new_l = col_l + s * (col_k - tau * col_l)
    A[:, k] = new_k
    A[k, :] = new_k
    A[:, l] = new_l
    A[l, :] = new_l
    A[k, k] = akk - t * akl
    A[l, l] = all_ + t * akl
    A[k, l] = 0.0
    A[l, k] = 0.0
