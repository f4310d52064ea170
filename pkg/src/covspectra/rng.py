"""Counter-based random streams.

A stream is addressed by (master seed, stream id); the Philox4x32-10 key is
the 64-bit seed and the id occupies the upper counter words, so streams for
distinct (domain, p, trial) triples are disjoint by construction. Position
within a stream is the lower counter, so draws never depend on execution
order across trials.
"""

from dataclasses import dataclass

from covspectra import _kernels

_MASK64 = 0xFFFFFFFFFFFFFFFF

# Domain tags keep independent experiment kinds on disjoint stream ids.
DOMAIN_SWEEP = 1
DOMAIN_BOUNDS = 2
DOMAIN_MP = 3

_P_BITS = 28
_TRIAL_BITS = 28


def stream_id(domain: int, p: int, trial: int) -> int:
    """Pack (domain, p, trial) into a unique 64-bit stream id."""
    if not 0 <= domain < 256:
        raise ValueError("domain must be in [0, 256)")
    if not 0 <= p < (1 << _P_BITS):
        raise ValueError(f"p must be in [0, 2^{_P_BITS})")
    if not 0 <= trial < (1 << _TRIAL_BITS):
        raise ValueError(f"trial must be in [0, 2^{_TRIAL_BITS})")
    return (domain << (_P_BITS + _TRIAL_BITS)) | (p << _TRIAL_BITS) | trial


@dataclass(frozen=True)
class RandomStream:
    """One private Philox stream: (seed, id) fully determine every draw."""

    seed: int
    stream: int

    def __post_init__(self):
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 0 <= self.stream <= _MASK64:
            raise ValueError("stream id must be a 64-bit unsigned integer")

    @property
    def _keys(self):
        return self.seed & 0xFFFFFFFF, (self.seed >> 32) & 0xFFFFFFFF

    def uniforms(self, count: int):
        k0, k1 = self._keys
        return _kernels.uniforms(k0, k1, self.stream, count)

    def normals(self, count: int):
        k0, k1 = self._keys
        return _kernels.normals(k0, k1, self.stream, count)


def substream(master_seed: int, domain: int, p: int, trial: int) -> RandomStream:
    """Private stream for one Monte Carlo trial."""
    return RandomStream(master_seed & _MASK64, stream_id(domain, p, trial))
