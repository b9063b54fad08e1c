"""Reproducible random streams keyed by ``(seed, stream_index)``."""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """Identifies an independent random stream.

    Distinct ``stream_index`` values map to distinct ``SeedSequence`` spawn keys,
    so their generators are statistically independent. Extra ``subkeys`` passed
    to :meth:`generator` address further independent sub-streams (chunk index,
    past/future side) without any shared mutable state.
    """

    seed: int
    stream_index: int = 0

    def generator(self, *subkeys):
        ss = np.random.SeedSequence(
            entropy=int(self.seed) & 0xFFFFFFFFFFFFFFFF,
            spawn_key=(int(self.stream_index), *(int(k) for k in subkeys)),
        )
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, index):
        """Stream for ensemble member/batch ``index`` under the same seed."""
        return RngStream(self.seed, index)


def as_generator(rng):
    """Accept an ``RngStream``, a ``Generator`` or an int seed."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
