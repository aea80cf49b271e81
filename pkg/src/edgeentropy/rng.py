"""Deterministic random streams.

All randomness in the toolkit flows through :class:`RngStream`, a thin
wrapper over numpy's ``SeedSequence``/``PCG64``. A stream is identified by a
``(seed, stream_id)`` pair; the same pair always yields the same sequence,
and distinct ``stream_id`` values (e.g. Monte Carlo trial indices) give
statistically independent sequences. Substream keys extend the spawn key so
that work parallelized over nodes or trials produces output identical to a
serial run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible random stream.

    Attributes:
        seed: base seed recorded in every output artifact
        stream_id: substream index, conventionally the trial number
    """

    seed: int
    stream_id: int = 0

    def generator(self, *subkeys: int) -> np.random.Generator:
        """Return a fresh PCG64 generator for this stream.

        Optional ``subkeys`` select a derived stream, e.g. one per source
        node during graph generation. Equal (seed, stream_id, subkeys)
        always produce an identical generator state.
        """
        seq = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.stream_id, *subkeys)
        )
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, stream_id: int) -> "RngStream":
        """Stream with the same seed and a different stream_id."""
        return RngStream(self.seed, stream_id)


def as_generator(rng: "RngStream | np.random.Generator") -> np.random.Generator:
    """Accept either a stream or an already-built generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng
