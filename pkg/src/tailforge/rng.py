"""Counter-based per-sample random streams.

Each matrix sample gets its own Philox generator keyed by the run's base seed
and positioned by (stream, sample index) in the high counter words. Draws
advance the low words only, so streams never overlap and a sample can be
regenerated from its tag without touching any other sample.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

MAIN_STREAM = 0
PILOT_STREAM = 1

_MASK64 = (1 << 64) - 1


class SeedTag(NamedTuple):
    base_seed: int
    index: int
    stream: int = MAIN_STREAM

    def generator(self) -> np.random.Generator:
        if self.base_seed < 0 or self.index < 0 or self.stream < 0:
            raise ValueError(f"seed tag fields must be nonnegative: {self}")
        counter = [0, 0, self.index & _MASK64, self.stream & _MASK64]
        return np.random.Generator(np.random.Philox(key=self.base_seed & _MASK64, counter=counter))


def as_seed_tag(tag) -> SeedTag:
    if isinstance(tag, SeedTag):
        return tag
    if isinstance(tag, (int, np.integer)):
        return SeedTag(int(tag), 0)
    return SeedTag(*(int(v) for v in tag))
