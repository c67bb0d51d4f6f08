"""Chunked, order-preserving evaluation of sampled ensembles across worker processes."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Iterator

import numpy as np

from rebitlab.entanglement import COLUMNS, evaluate_batch
from rebitlab.sampling import EnsembleKind, SeedSpec, chunk_states


def resolve_workers(workers) -> int:
    if workers in (None, "auto"):
        return os.cpu_count() or 1
    workers = int(workers)
    if workers < 1:
        raise ValueError("workers must be a positive integer or 'auto'")
    return workers


def chunk_records(kind: EnsembleKind, seed: SeedSpec, chunk_index: int, size: int) -> dict[str, np.ndarray]:
    return evaluate_batch(chunk_states(kind, seed, chunk_index, size))


def _chunk_job(args):
    return chunk_records(*args)


def iter_records(kind, n_samples: int, seed: SeedSpec, workers=1) -> Iterator[dict[str, np.ndarray]]:
    """Yield per-chunk record columns in chunk-index order.

    Results are identical for any worker count because each chunk's stream
    depends only on ``(seed.master_seed, chunk_index)``.
    """
    kind = EnsembleKind(kind)
    jobs = [(kind, seed, k, size) for k, size in seed.chunks(n_samples)]
    nworkers = min(resolve_workers(workers), max(len(jobs), 1))
    if nworkers == 1:
        for job in jobs:
            yield _chunk_job(job)
        return
    with ProcessPoolExecutor(max_workers=nworkers) as pool:
        yield from pool.map(_chunk_job, jobs)


def collect_records(kind, n_samples: int, seed: SeedSpec, workers=1) -> dict[str, np.ndarray]:
    parts = list(iter_records(kind, n_samples, seed, workers))
    if not parts:
        return {k: np.empty(0) for k in COLUMNS}
    return {k: np.concatenate([p[k] for p in parts]) for k in COLUMNS}
