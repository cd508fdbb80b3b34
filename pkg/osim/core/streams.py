# osim/core/streams.py
"""Deterministic random streams.

Every stream is spawned from ``SeedSequence(master_seed, spawn_key=keys)``, so a
(master seed, key path) pair always yields the same draws regardless of how many
worker threads run the chunks.
"""
import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from osim.config import app_settings

logger = logging.getLogger(__name__)

Key = Union[int, str]


def scenario_seed(key: str) -> int:
    """Stable 32-bit integer for a string key (scenario ids, sample tags)."""
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")


def _as_int_keys(keys: Sequence[Key]) -> Tuple[int, ...]:
    return tuple(scenario_seed(k) if isinstance(k, str) else int(k) for k in keys)


def derive_seed_sequence(master_seed: int, *keys: Key) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(master_seed), spawn_key=_as_int_keys(keys))


def child_generator(master_seed: int, *keys: Key) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed_sequence(master_seed, *keys)))


def chunk_bounds(total: int, chunk: int) -> List[Tuple[int, int]]:
    if total < 0 or chunk <= 0:
        raise ValueError(f"invalid chunking: total={total}, chunk={chunk}")
    return [(start, min(start + chunk, total)) for start in range(0, total, chunk)]


def sample_in_chunks(draw: Callable[[np.random.Generator, int], np.ndarray], total: int, master_seed: int,
                     keys: Sequence[Key] = (), chunk: Optional[int] = None,
                     workers: Optional[int] = None) -> np.ndarray:
    """Run ``draw(rng, size)`` over fixed-size chunks and stack the results row-wise.

    Chunk ``j`` draws from ``child_generator(master_seed, *keys, j)``; the output
    depends only on the seed, the keys, ``total`` and ``chunk``.
    """
    chunk = app_settings.SAMPLING_CHUNK if chunk is None else chunk
    workers = app_settings.WORKERS if workers is None else workers
    bounds = chunk_bounds(total, chunk)
    logger.debug(f"Sampling {total} draws in {len(bounds)} chunks (keys={tuple(keys)}, workers={workers})")

    def run(index: int) -> np.ndarray:
        start, stop = bounds[index]
        return draw(child_generator(master_seed, *keys, index), stop - start)

    if workers <= 1 or len(bounds) <= 1:
        parts = [run(j) for j in range(len(bounds))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(bounds))))
    if not parts:
        return np.empty((0,))
    return np.concatenate(parts, axis=0)
