"""LIBSVM parsing, column partitioning and spectral diagnostics.

The data matrix is column oriented: column j is instance j, so columns are
dual coordinates.  Storage is a scipy CSC matrix with sorted indices.
"""
from __future__ import annotations

import io
import json
import logging
import math
import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass
class SparseColumnMatrix:
    """n_rows x n_cols matrix with one sparse column per instance."""

    csc: sp.csc_matrix

    def __post_init__(self):
        m = sp.csc_matrix(self.csc, dtype=np.float64)
        m.eliminate_zeros()
        m.sort_indices()
        self.csc = m

    @classmethod
    def from_columns(cls, columns, n_rows: int | None = None) -> "SparseColumnMatrix":
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for col in columns:
            for r, val in col:
                indices.append(int(r))
                data.append(float(val))
            indptr.append(len(indices))
        if n_rows is None:
            n_rows = max(indices) + 1 if indices else 0
        m = sp.csc_matrix((np.asarray(data, dtype=np.float64),
                           np.asarray(indices, dtype=np.int64),
                           np.asarray(indptr, dtype=np.int64)),
                          shape=(n_rows, len(indptr) - 1))
        return cls(m)

    @classmethod
    def from_dense(cls, X) -> "SparseColumnMatrix":
        return cls(sp.csc_matrix(np.asarray(X, dtype=np.float64)))

    @property
    def n_rows(self) -> int:
        return self.csc.shape[0]

    @property
    def n_cols(self) -> int:
        return self.csc.shape[1]

    @property
    def nnz(self) -> int:
        return self.csc.nnz

    def column(self, j: int) -> list[tuple[int, float]]:
        s, e = self.csc.indptr[j], self.csc.indptr[j + 1]
        return list(zip(self.csc.indices[s:e].tolist(), self.csc.data[s:e].tolist()))

    @property
    def columns(self) -> list[list[tuple[int, float]]]:
        return [self.column(j) for j in range(self.n_cols)]

    def column_nnz(self) -> np.ndarray:
        return np.diff(self.csc.indptr)

    def column_sqnorms(self) -> np.ndarray:
        sq = self.csc.multiply(self.csc)
        return np.asarray(sq.sum(axis=0)).ravel()

    def matvec(self, a: np.ndarray) -> np.ndarray:
        """X @ a (length n_rows)."""
        return self.csc @ np.asarray(a, dtype=np.float64)

    def rmatvec(self, v: np.ndarray) -> np.ndarray:
        """X.T @ v (one margin per instance)."""
        return self.csc.T @ np.asarray(v, dtype=np.float64)

    def toarray(self) -> np.ndarray:
        return self.csc.toarray()


def parse_libsvm(stream, n_rows: int | None = None) -> tuple[np.ndarray, SparseColumnMatrix]:
    """Read ``<label> <idx>:<val> ...`` lines (1-based indices).

    Returns the label vector and the column-oriented matrix.  Blank lines and
    ``#`` comments are skipped.  Duplicate or unsorted indices within a line
    are rejected, as are non-finite numbers.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    labels: list[float] = []
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    max_idx = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise ParseError(lineno, f"bad label {tokens[0]!r}") from None
        if not math.isfinite(label):
            raise ParseError(lineno, "non-finite label")
        prev = 0
        for tok in tokens[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise ParseError(lineno, f"expected idx:val, got {tok!r}")
            try:
                idx = int(idx_s)
                val = float(val_s)
            except ValueError:
                raise ParseError(lineno, f"bad feature {tok!r}") from None
            if idx < 1:
                raise ParseError(lineno, f"feature index must be >= 1, got {idx}")
            if idx == prev:
                raise ParseError(lineno, f"duplicate feature index {idx}")
            if idx < prev:
                raise ParseError(lineno, f"feature indices not increasing at {idx}")
            if not math.isfinite(val):
                raise ParseError(lineno, f"non-finite value for feature {idx}")
            prev = idx
            if val != 0.0:
                indices.append(idx - 1)
                data.append(val)
        max_idx = max(max_idx, prev)
        labels.append(label)
        indptr.append(len(indices))
    rows = max_idx if n_rows is None else n_rows
    if rows < max_idx:
        raise ValueError(f"n_rows={n_rows} smaller than max feature index {max_idx}")
    m = sp.csc_matrix((np.asarray(data, dtype=np.float64),
                       np.asarray(indices, dtype=np.int64),
                       np.asarray(indptr, dtype=np.int64)),
                      shape=(rows, len(labels)))
    return np.asarray(labels, dtype=np.float64), SparseColumnMatrix(m)


def load_libsvm(path: str | os.PathLike, n_rows: int | None = None):
    with open(path) as fh:
        return parse_libsvm(fh, n_rows=n_rows)


def serialize_libsvm(labels, X: SparseColumnMatrix) -> str:
    out = []
    for j, lab in enumerate(labels):
        feats = " ".join(f"{r + 1}:{val!r}" for r, val in X.column(j))
        lab_s = repr(float(lab))
        out.append(f"{lab_s} {feats}".rstrip())
    return "".join(line + "\n" for line in out)


def save_libsvm(path, labels, X: SparseColumnMatrix) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_libsvm(labels, X))


@dataclass
class Partition:
    assignment: np.ndarray  # column -> worker id
    blocks: list[np.ndarray]  # per-worker sorted column indices

    @property
    def K(self) -> int:
        return len(self.blocks)

    @classmethod
    def from_blocks(cls, blocks, n_cols: int | None = None) -> "Partition":
        blocks = [np.sort(np.asarray(b, dtype=np.int64)) for b in blocks]
        if n_cols is None:
            n_cols = sum(len(b) for b in blocks)
        assignment = np.full(n_cols, -1, dtype=np.int64)
        for k, b in enumerate(blocks):
            if np.any(assignment[b] >= 0):
                raise ValueError("partition blocks overlap")
            assignment[b] = k
        if np.any(assignment < 0):
            raise ValueError("partition blocks do not cover all columns")
        return cls(assignment, blocks)

    def check(self) -> None:
        seen = np.concatenate(self.blocks) if self.blocks else np.array([], dtype=np.int64)
        if len(seen) != len(self.assignment) or len(np.unique(seen)) != len(seen):
            raise AssertionError("blocks are not a partition")
        for k, b in enumerate(self.blocks):
            if np.any(self.assignment[b] != k):
                raise AssertionError("assignment and blocks disagree")

    def to_json(self) -> str:
        return json.dumps({"blocks": [b.tolist() for b in self.blocks]})

    @classmethod
    def from_json(cls, s: str) -> "Partition":
        return cls.from_blocks(json.loads(s)["blocks"])


def _contiguous_splits(nnz: np.ndarray, K: int) -> list[int]:
    """Split points e_1 <= ... <= e_{K-1} minimizing the maximum block load.

    Among optimal splits the lexicographically earliest is returned, with
    every block non-empty while columns remain.
    """
    N = len(nnz)
    prefix = np.concatenate([[0], np.cumsum(nnz, dtype=np.int64)])

    def need(cap):
        # nxt[i]: end of the greedy block starting at i; cnt[i]: blocks for suffix i
        nxt = np.searchsorted(prefix, prefix + cap, side="right") - 1
        nxt = np.maximum(nxt, np.minimum(np.arange(N + 1) + 1, N))
        cnt = np.zeros(N + 1, dtype=np.int64)
        for i in range(N - 1, -1, -1):
            cnt[i] = 1 + cnt[nxt[i]]
        return nxt, cnt

    lo = int(nnz.max()) if N else 0
    hi = int(prefix[-1])
    while lo < hi:
        mid = (lo + hi) // 2
        if need(mid)[1][0] <= K:
            hi = mid
        else:
            lo = mid + 1
    nxt, cnt = need(lo)
    splits = []
    s = 0
    for k in range(K - 1):
        if s >= N:
            splits.append(N)
            continue
        remaining = K - k - 1
        e = s + 1
        while cnt[e] > remaining:
            e += 1
        if e > nxt[s]:  # pragma: no cover - guarded by feasibility of lo
            raise AssertionError("infeasible split")
        splits.append(e)
        s = e
    return splits


def partition_by_nnz(column_nnz, K: int, shuffle: bool = False, seed: int = 0) -> Partition:
    """Assign contiguous column ranges to K workers balanced by non-zero count.

    With ``shuffle`` the columns are permuted by a seeded RNG first and the
    contiguous split is taken over the permuted order.
    """
    nnz = np.asarray(column_nnz, dtype=np.int64)
    if K < 1:
        raise ValueError("K must be >= 1")
    N = len(nnz)
    if N == 0:
        raise ValueError("cannot partition an empty column list")
    if K > N:
        log.warning("K=%d exceeds the number of columns %d; some workers get no data", K, N)
    order = np.random.default_rng(seed).permutation(N) if shuffle else np.arange(N)
    # zero-nnz columns still cost a coordinate update
    splits = _contiguous_splits(nnz[order], K)
    bounds = [0, *splits, N]
    blocks = [np.sort(order[bounds[k]:bounds[k + 1]]) for k in range(K)]
    return Partition.from_blocks(blocks, N)


def partition_rows(n: int, K: int) -> list[slice]:
    """Even contiguous split of the feature dimension for partial inner products."""
    edges = np.linspace(0, n, K + 1).round().astype(int)
    return [slice(int(edges[k]), int(edges[k + 1])) for k in range(K)]


def spectral_norm_sq(X, rtol: float = 1e-6, max_iter: int = 1000) -> float:
    """Largest eigenvalue of X.T @ X by power iteration from the all-ones vector."""
    A = X.csc if isinstance(X, SparseColumnMatrix) else sp.csc_matrix(X)
    N = A.shape[1]
    if N == 0 or A.shape[0] == 0:
        raise ValueError("spectral_norm_sq needs a non-empty matrix")
    if A.nnz == 0:
        return 0.0
    x = np.ones(N) / math.sqrt(N)
    lam = 0.0
    for _ in range(max_iter):
        y = A.T @ (A @ x)
        new = float(x @ y)
        nrm = float(np.linalg.norm(y))
        if nrm == 0.0:
            # start vector in the null space; restart from a deterministic pseudo-random vector
            x = np.random.default_rng(0).standard_normal(N)
            x /= np.linalg.norm(x)
            continue
        x = y / nrm
        if abs(new - lam) <= rtol * abs(new):
            lam = new
            break
        lam = new
    return float(lam)


def make_synthetic(n_features: int, n_instances: int, density: float, seed: int = 0,
                   task: str = "classification", noise: float = 0.1,
                   sort_labels: bool = False, correlated: bool = False):
    """Random sparse data with unit-norm instances and a planted linear model.

    ``sort_labels`` groups instances by label so contiguous partitions see
    different class distributions.  ``correlated`` shares a dense-ish set
    of common features across instances, which makes X.T @ X far from
    block diagonal.
    """
    rng = np.random.default_rng(seed)
    X = sp.random(n_features, n_instances, density=density, format="csc",
                  random_state=rng, data_rvs=rng.standard_normal)
    if correlated:
        common = max(1, n_features // 50)
        extra = sp.random(common, n_instances, density=0.5, format="csc",
                          random_state=rng, data_rvs=lambda k: 1.0 + 0.3 * rng.standard_normal(k))
        X = sp.vstack([extra, X[common:]], format="csc")
    nnz = np.diff(X.indptr)
    empty = np.flatnonzero(nnz == 0)
    if len(empty):
        rows = rng.integers(0, n_features, size=len(empty))
        X = X + sp.csc_matrix((np.ones(len(empty)), (rows, empty)), shape=X.shape)
    X = sp.csc_matrix(X)
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=0)).ravel())
    X = X @ sp.diags(1.0 / norms)
    w = rng.standard_normal(n_features)
    margin = X.T @ w
    margin /= max(1e-12, np.std(margin))
    if task == "classification":
        y = np.where(margin + noise * rng.standard_normal(n_instances) >= 0, 1.0, -1.0)
    else:
        y = margin + noise * rng.standard_normal(n_instances)
    if sort_labels:
        order = np.argsort(y, kind="stable")
        X = X[:, order]
        y = y[order]
    return np.asarray(y, dtype=np.float64), SparseColumnMatrix(sp.csc_matrix(X))
