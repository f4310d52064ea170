"""Kernel backend tests: Philox correctness, polar sequence, cross-backend
agreement between the compiled core and the NumPy fallback."""

import math

import numpy as np
import pytest

from covspectra._kernels import _pykernels

try:
    from covspectra._kernels import _cykernels
except ImportError:
    _cykernels = None

BACKENDS = [_pykernels] + ([_cykernels] if _cykernels else [])
IDS = ["python"] + (["cython"] if _cykernels else [])

_M0, _M1 = 0xD2511F53, 0xCD9E8D57
_W0, _W1 = 0x9E3779B9, 0xBB67AE85
_MASK = 0xFFFFFFFF


def philox_oracle(c0, c1, c2, c3, k0, k1):
    """Philox4x32-10 on Python big ints: the independent reference."""
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = ((p1 >> 32) & _MASK ^ c1 ^ k0, p1 & _MASK,
                          (p0 >> 32) & _MASK ^ c3 ^ k1, p0 & _MASK)
        k0 = (k0 + _W0) & _MASK
        k1 = (k1 + _W1) & _MASK
    return c0, c1, c2, c3


def uniforms_oracle(key0, key1, stream, count):
    out = []
    block = 0
    while len(out) < count:
        o = philox_oracle(block & _MASK, block >> 32,
                          stream & _MASK, (stream >> 32) & _MASK, key0, key1)
        out.append((((o[0] << 32) | o[1]) >> 11) * 2.0 ** -53)
        out.append((((o[2] << 32) | o[3]) >> 11) * 2.0 ** -53)
        block += 1
    return np.array(out[:count])


def normals_oracle(key0, key1, stream, count):
    """Scalar polar sampler on top of the uniform oracle."""
    out = []
    block = 0
    while len(out) < count:
        o = philox_oracle(block & _MASK, block >> 32,
                          stream & _MASK, (stream >> 32) & _MASK, key0, key1)
        u1 = (((o[0] << 32) | o[1]) >> 11) * 2.0 ** -53
        u2 = (((o[2] << 32) | o[3]) >> 11) * 2.0 ** -53
        block += 1
        v1, v2 = 2.0 * u1 - 1.0, 2.0 * u2 - 1.0
        s = v1 * v1 + v2 * v2
        if s >= 1.0 or s <= 0.0:
            continue
        f = math.sqrt(-2.0 * math.log(s) / s)
        out.append(v1 * f)
        out.append(v2 * f)
    return np.array(out[:count])


# canonical Random123 known-answer vectors for philox4x32-10
@pytest.mark.parametrize("ctr,key,expected", [
    ((0, 0, 0, 0), (0, 0),
     (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    ((_MASK,) * 4, (_MASK, _MASK),
     (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD)),
    ((0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344),
     (0xA4093822, 0x299F31D0),
     (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1)),
])
def test_philox_known_answer(ctr, key, expected):
    assert philox_oracle(*ctr, *key) == expected


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
def test_uniforms_match_oracle(mod):
    got = mod.uniforms(0xDEADBEEF, 0x1234, 99, 257)
    assert np.array_equal(got, uniforms_oracle(0xDEADBEEF, 0x1234, 99, 257))


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
def test_uniforms_range_and_determinism(mod):
    u = mod.uniforms(7, 8, 9, 10_000)
    assert np.all((u >= 0.0) & (u < 1.0))
    assert np.array_equal(u, mod.uniforms(7, 8, 9, 10_000))
    # crude uniformity
    assert abs(u.mean() - 0.5) < 0.02
    assert mod.uniforms(1, 2, 3, 0).size == 0


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
def test_normals_match_scalar_oracle(mod):
    got = mod.normals(0xABCD, 0xEF01, 5, 1003)
    ref = normals_oracle(0xABCD, 0xEF01, 5, 1003)
    # identical accept/reject path; only libm log rounding may differ
    np.testing.assert_allclose(got, ref, rtol=5e-14, atol=0)


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
def test_normals_batch_invariance(mod):
    whole = mod.normals(3, 4, 5, 400)
    assert np.array_equal(whole[:123], mod.normals(3, 4, 5, 123))


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
def test_normals_moments(mod):
    z = mod.normals(11, 22, 33, 200_000)
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1.0) < 0.01
    assert abs((z ** 3).mean()) < 0.03


def test_streams_are_disjoint():
    a = _pykernels.uniforms(1, 2, 1000, 64)
    b = _pykernels.uniforms(1, 2, 1001, 64)
    assert not np.any(a == b)


@pytest.mark.skipif(_cykernels is None, reason="compiled backend unavailable")
class TestCrossBackend:
    def test_uniforms_bit_identical(self):
        a = _pykernels.uniforms(0xFEED, 0xFACE, 77, 4097)
        b = _cykernels.uniforms(0xFEED, 0xFACE, 77, 4097)
        assert np.array_equal(a, b)

    def test_normals_agree_to_rounding(self):
        a = _pykernels.normals(0xFEED, 0xFACE, 78, 50_001)
        b = _cykernels.normals(0xFEED, 0xFACE, 78, 50_001)
        np.testing.assert_allclose(a, b, rtol=5e-14, atol=0)

    def test_jacobi_agree(self):
        rs = np.random.RandomState(8)
        A = rs.randn(12, 12)
        S = (A + A.T) / 2.0
        wa = _pykernels.jacobi_eigenvalues(S)[0]
        wb = _cykernels.jacobi_eigenvalues(S)[0]
        np.testing.assert_allclose(wa, wb, rtol=0, atol=1e-12)


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
def test_jacobi_against_lapack(mod):
    rs = np.random.RandomState(1)
    for p in (2, 3, 5, 17):
        A = rs.randn(p, p)
        S = (A + A.T) / 2
        eigs, off, sweeps = mod.jacobi_eigenvalues(S)
        norm = np.sqrt((S * S).sum())
        assert off <= 1e-11 * norm
        np.testing.assert_allclose(eigs, np.linalg.eigvalsh(S)[::-1],
                                   rtol=0, atol=1e-12 * max(1.0, norm))


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
def test_jacobi_edge_cases(mod):
    eigs, off, sweeps = mod.jacobi_eigenvalues(np.zeros((3, 3)))
    assert np.array_equal(eigs, np.zeros(3)) and sweeps == 0
    eigs, _, _ = mod.jacobi_eigenvalues(np.array([[4.0]]))
    assert np.array_equal(eigs, [4.0])
    eigs, _, _ = mod.jacobi_eigenvalues(np.diag([1.0, 5.0, 3.0]))
    assert np.array_equal(eigs, [5.0, 3.0, 1.0])
