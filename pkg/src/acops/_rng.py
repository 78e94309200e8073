"""Keyed random substreams and a chunked trial runner.

Every Monte Carlo loop in the package is split into fixed-size chunks. Chunk
``i`` of stream ``tag`` always draws from the generator keyed by
``(seed, tag, i)``, so results do not depend on how many worker threads run
the chunks.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

DEFAULT_SEED = 20100417
CHUNK_TRIALS = 16384

T = TypeVar("T")


def _tag_key(tag: str | int) -> int:
    if isinstance(tag, int):
        return tag
    return zlib.crc32(tag.encode("utf-8"))


def substream(seed: int, *key: str | int) -> np.random.Generator:
    """Independent generator for ``(seed, *key)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_tag_key(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(DEFAULT_SEED if rng is None else rng)


def chunk_sizes(trials: int, chunk: int = CHUNK_TRIALS) -> list[int]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    full, rem = divmod(trials, chunk)
    return [chunk] * full + ([rem] if rem else [])


def run_chunked(
    fn: Callable[[np.random.Generator, int], T],
    trials: int,
    seed: int,
    tag: str,
    threads: int = 1,
    chunk: int = CHUNK_TRIALS,
) -> list[T]:
    """Call ``fn(rng, n)`` once per chunk and return results in chunk order."""
    sizes = chunk_sizes(trials, chunk)
    jobs: Sequence[tuple[int, int]] = list(enumerate(sizes))

    def one(job: tuple[int, int]) -> T:
        idx, n = job
        return fn(substream(seed, tag, idx), n)

    if threads <= 1 or len(jobs) == 1:
        return [one(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, jobs))
