"""Counter-based deterministic Gaussian stream.

Built on the Philox-4x64 counter-based generator: the stream state is fully
described by ``(seed, chain_id, counter)``, where the 128-bit Philox key is
``[seed, chain_id]`` and ``counter`` counts consumed 4-output blocks.  Raw
64-bit outputs are mapped to standard normals through the inverse normal CDF
applied to 53-bit uniforms in (0, 1):

    u = (raw >> 11) * 2**-53 + 2**-54,    z = ndtri(u)

Every call consumes whole blocks, so replaying a stream from the same
``(seed, chain_id, counter)`` reproduces draws bit for bit, and streams with
distinct keys are independent by construction.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

# Frozen algorithm tag, emitted in run metadata.
RNG_ALGORITHM = "philox4x64/inverse-cdf-53bit"

_U64_11 = np.uint64(11)
_SCALE = 2.0**-53
_OFFSET = 2.0**-54

_MASK64 = (1 << 64) - 1


class RandomStream:
    """Deterministic Gaussian stream addressed by ``(seed, chain_id)``.

    The underlying bit generator is cached and kept in lockstep with
    ``counter``; reconstructing a stream at a stored counter resumes the
    exact sequence.
    """

    def __init__(self, seed: int, chain_id: int = 0, counter: int = 0):
        if counter < 0:
            raise ValueError(f"counter must be nonnegative, got {counter}")
        self.seed = int(seed) & _MASK64
        self.chain_id = int(chain_id) & _MASK64
        self.counter = int(counter)
        self._bitgen = np.random.Philox(
            key=[self.seed, self.chain_id], counter=[self.counter, 0, 0, 0]
        )

    def __repr__(self):
        return (
            f"RandomStream(seed={self.seed}, chain_id={self.chain_id}, "
            f"counter={self.counter})"
        )

    def spawn(self, chain_id: int) -> "RandomStream":
        """Independent stream with the same seed and a different chain id."""
        return RandomStream(self.seed, chain_id)

    def gaussian(self, n: int) -> np.ndarray:
        """Draw ``n`` standard normals, advancing ``counter`` by ``ceil(n/4)``."""
        if n < 1:
            raise ValueError(f"need n >= 1 draws, got {n}")
        nblocks = -(-n // 4)
        raw = self._bitgen.random_raw(4 * nblocks)
        self.counter += nblocks
        u = (raw >> _U64_11) * _SCALE + _OFFSET
        return ndtri(u[:n])


def gaussian_draw(stream: RandomStream, n: int) -> np.ndarray:
    """Draw ``n`` standard normals from ``stream`` (see ``RandomStream.gaussian``)."""
    return stream.gaussian(n)
