"""In-process simulation of K workers joined by allreduce.

Worker computations run through :meth:`Cluster.map`, either one after the
other or on a thread pool.  Every cross-worker value goes through
:meth:`Cluster.allreduce_vector` / :meth:`Cluster.allreduce_scalar`, which
sum in ascending worker order so the result does not depend on the
scheduler.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

BYTES_PER_REAL = 8


class ContractError(ValueError):
    pass


@dataclass
class CommStats:
    n: int
    vector_allreduce_rounds: int = 0
    scalar_allreduce_rounds: int = 0
    # objective monitoring (primal value / pocket), kept out of the algorithm's budget
    monitor_rounds: int = 0

    @property
    def rounds(self) -> int:
        return self.vector_allreduce_rounds + self.scalar_allreduce_rounds

    @property
    def bytes_total(self) -> int:
        return BYTES_PER_REAL * (self.n * self.vector_allreduce_rounds + self.scalar_allreduce_rounds)

    def snapshot(self) -> "CommStats":
        return CommStats(self.n, self.vector_allreduce_rounds,
                         self.scalar_allreduce_rounds, self.monitor_rounds)

    def to_dict(self) -> dict:
        return {
            "vector_allreduce_rounds": self.vector_allreduce_rounds,
            "scalar_allreduce_rounds": self.scalar_allreduce_rounds,
            "monitor_rounds": self.monitor_rounds,
            "rounds": self.rounds,
            "bytes_total": self.bytes_total,
        }


def simulated_time(stats: CommStats, latency: float, bandwidth: float) -> float:
    """rounds * latency + bytes / bandwidth."""
    if latency < 0 or bandwidth <= 0:
        raise ValueError("latency must be >= 0 and bandwidth > 0")
    return stats.rounds * latency + stats.bytes_total / bandwidth


@dataclass
class WorkerContext:
    worker_id: int
    block: np.ndarray
    rows: slice
    rng: np.random.Generator = field(repr=False)


class Cluster:
    """K logical workers with deterministic reductions.

    ``scheduler`` is ``"sequential"`` or ``"threads"``.
    """

    def __init__(self, K: int, n: int, scheduler: str = "sequential"):
        if K < 1:
            raise ValueError("K must be >= 1")
        if scheduler not in ("sequential", "threads"):
            raise ValueError(f"unknown scheduler {scheduler!r}")
        self.K = K
        self.n = n
        self.scheduler = scheduler
        self.stats = CommStats(n)
        self._pool = ThreadPoolExecutor(max_workers=K) if scheduler == "threads" else None

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def map(self, fn, items) -> list:
        """Run ``fn`` once per worker; results come back in worker order."""
        items = list(items)
        if len(items) != self.K:
            raise ContractError(f"expected {self.K} worker inputs, got {len(items)}")
        if self._pool is None:
            return [fn(it) for it in items]
        return list(self._pool.map(fn, items))

    @staticmethod
    def _ordered_sum(parts):
        total = parts[0].copy() if isinstance(parts[0], np.ndarray) else parts[0]
        for p in parts[1:]:
            total = total + p
        return total

    def allreduce_vector(self, parts) -> np.ndarray:
        parts = [np.asarray(p, dtype=np.float64) for p in parts]
        if len(parts) != self.K:
            raise ContractError(f"expected {self.K} partial vectors, got {len(parts)}")
        for p in parts:
            if p.shape != (self.n,):
                raise ContractError(f"partial vector has shape {p.shape}, expected ({self.n},)")
        self.stats.vector_allreduce_rounds += 1
        total = self._ordered_sum(parts)
        total.flags.writeable = False
        return total

    def allreduce_scalar(self, parts, monitor: bool = False) -> float:
        parts = [float(p) for p in parts]
        if len(parts) != self.K:
            raise ContractError(f"expected {self.K} partial scalars, got {len(parts)}")
        if monitor:
            self.stats.monitor_rounds += 1
        else:
            self.stats.scalar_allreduce_rounds += 1
        return self._ordered_sum(parts)
