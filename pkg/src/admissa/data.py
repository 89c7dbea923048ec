"""Datasets, partitions and shared geometry (distances, neighbors, MST).

Everything downstream (criteria, initializers, the evolutionary clusterer)
consumes the cached O(n^2) distance table built here, so it is computed
once per dataset. All types are immutable after construction; ties are
broken by ascending point index throughout so runs are bit-reproducible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class DataError(ValueError):
    """Malformed input data (CSV parsing, shape or label problems)."""


def canonical_labels(assignment: np.ndarray) -> np.ndarray:
    """Relabel clusters densely, ordered by smallest member index.

    Two assignments describe the same partition iff their canonical forms
    are equal, which is the duplicate-detection rule used everywhere.
    """
    assignment = np.asarray(assignment)
    _, first, inverse = np.unique(assignment, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    remap = np.empty(len(order), dtype=np.int64)
    remap[order] = np.arange(len(order))
    return remap[inverse]


@dataclass(eq=False)
class Partition:
    """A hard assignment of every point to exactly one of k clusters."""

    assignment: np.ndarray
    k: int = field(default=0)

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=np.int64)
        if self.assignment.ndim != 1 or self.assignment.size == 0:
            raise DataError("assignment must be a non-empty 1-d array")
        present = np.unique(self.assignment)
        if self.k == 0:
            self.k = int(present.size)
        if present[0] < 0 or present[-1] >= self.k:
            raise DataError(f"cluster ids must lie in [0, {self.k - 1}]")
        if present.size != self.k:
            raise DataError("every cluster id in [0, k-1] must be non-empty")
        self.assignment.setflags(write=False)

    @property
    def n(self) -> int:
        return self.assignment.size

    @cached_property
    def members(self) -> list[np.ndarray]:
        """Per-cluster arrays of point indices (ascending)."""
        order = np.argsort(self.assignment, kind="stable")
        bounds = np.searchsorted(self.assignment[order], np.arange(self.k + 1))
        return [order[bounds[i]:bounds[i + 1]] for i in range(self.k)]

    @cached_property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.k)

    def canonical(self) -> "Partition":
        return Partition(canonical_labels(self.assignment))

    def key(self) -> bytes:
        """Hashable identity up to cluster relabeling."""
        return canonical_labels(self.assignment).tobytes()

    def same_as(self, other: "Partition") -> bool:
        return self.n == other.n and self.key() == other.key()


@dataclass(eq=False)
class Dataset:
    """Points in d-dimensional space with optional ground-truth labels.

    Heavy geometry (distance matrix, neighbor index, MST) is computed
    lazily and cached; the arrays are marked read-only so a dataset can be
    shared freely across workers.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    name: str = "dataset"
    label_names: list[str] | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2:
            raise DataError("points must be a 2-d array")
        n, d = self.points.shape
        if n < 2:
            raise DataError("a dataset needs at least 2 points")
        if d < 1:
            raise DataError("points need at least one feature")
        if not np.all(np.isfinite(self.points)):
            raise DataError("points must be finite")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (n,):
                raise DataError("labels must have one entry per point")
            present = np.unique(self.labels)
            k = present.size
            if present[0] != 0 or present[-1] != k - 1:
                raise DataError("labels must be dense ids 0..k*-1")
            self.labels.setflags(write=False)
        self.points.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def k_star(self) -> int | None:
        if self.labels is None:
            return None
        return int(self.labels.max()) + 1

    def true_partition(self) -> Partition:
        if self.labels is None:
            raise DataError(f"dataset {self.name!r} has no ground-truth labels")
        return Partition(canonical_labels(self.labels))

    @cached_property
    def distances(self) -> np.ndarray:
        """Symmetric n x n Euclidean distance matrix with zero diagonal."""
        sq = np.sum(self.points ** 2, axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (self.points @ self.points.T)
        np.maximum(d2, 0.0, out=d2)
        dm = np.sqrt(d2)
        dm = 0.5 * (dm + dm.T)  # enforce exact symmetry
        np.fill_diagonal(dm, 0.0)
        dm.setflags(write=False)
        return dm

    @cached_property
    def neighbor_index(self) -> np.ndarray:
        """(n, n-1) index array: row a lists the other points by ascending
        distance from a, ties broken by ascending point index."""
        n = self.n
        idx = np.arange(n)
        order = np.lexsort((np.tile(idx, (n, 1)), self.distances), axis=1)
        out = np.empty((n, n - 1), dtype=np.int64)
        for a in range(n):
            row = order[a]
            out[a] = row[row != a]
        out.setflags(write=False)
        return out

    @cached_property
    def neighbor_rank(self) -> np.ndarray:
        """(n, n) matrix: rank[a, b] = 1-based position of b in a's neighbor
        list (0 on the diagonal)."""
        n = self.n
        rank = np.zeros((n, n), dtype=np.int64)
        rows = np.repeat(np.arange(n), n - 1)
        rank[rows, self.neighbor_index.ravel()] = np.tile(np.arange(1, n), n)
        rank.setflags(write=False)
        return rank

    @cached_property
    def mst_edges(self) -> np.ndarray:
        """(n-1, 2) array of MST edges (a < b), sorted lexicographically."""
        return minimum_spanning_tree(self.distances)

    def translated(self, vector) -> "Dataset":
        return Dataset(self.points + np.asarray(vector, dtype=np.float64),
                       labels=None if self.labels is None else self.labels.copy(),
                       name=self.name, label_names=self.label_names)


def pairwise_distances(ds: Dataset) -> np.ndarray:
    return ds.distances


def knn_index(dm: np.ndarray) -> np.ndarray:
    """Neighbor lists from a raw distance matrix (see Dataset.neighbor_index)."""
    n = dm.shape[0]
    idx = np.arange(n)
    order = np.lexsort((np.tile(idx, (n, 1)), dm), axis=1)
    out = np.empty((n, n - 1), dtype=np.int64)
    for a in range(n):
        row = order[a]
        out[a] = row[row != a]
    return out


def centroids(ds: Dataset, pi: Partition) -> tuple[np.ndarray, np.ndarray]:
    """Per-cluster mean vectors plus the overall dataset centroid."""
    if pi.n != ds.n:
        raise DataError("partition size does not match dataset")
    sums = np.zeros((pi.k, ds.dim))
    np.add.at(sums, pi.assignment, ds.points)
    cents = sums / pi.sizes[:, None]
    return cents, ds.points.mean(axis=0)


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:  # keep the smaller index as root
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def minimum_spanning_tree(dm: np.ndarray) -> np.ndarray:
    """Kruskal over the dense matrix; ties prefer the lexicographically
    smaller edge, so the tree is unique given the matrix."""
    n = dm.shape[0]
    if n < 2:
        raise DataError("MST needs at least 2 points")
    ii, jj = np.triu_indices(n, k=1)
    ww = dm[ii, jj]
    order = np.lexsort((jj, ii, ww))
    uf = _UnionFind(n)
    edges = []
    for e in order:
        a, b = int(ii[e]), int(jj[e])
        if uf.union(a, b):
            edges.append((a, b))
            if len(edges) == n - 1:
                break
    edges.sort()
    arr = np.array(edges, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def load_dataset(path, label_column: str | None = None, name: str | None = None) -> Dataset:
    """Read a headered CSV of numeric feature columns plus an optional label
    column. Labels are re-indexed densely in order of first appearance; the
    original strings are kept for reporting."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: inconsistent arity "
                                f"({len(row)} fields, expected {len(header)})")
            rows.append(row)
    if not rows:
        raise DataError(f"{path}: no data rows")

    if label_column is not None:
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} absent")
        label_pos = header.index(label_column)
    else:
        label_pos = None

    feature_pos = [i for i in range(len(header)) if i != label_pos]
    points = np.empty((len(rows), len(feature_pos)))
    for r, row in enumerate(rows):
        for c, pos in enumerate(feature_pos):
            try:
                points[r, c] = float(row[pos])
            except ValueError:
                raise DataError(f"{path}: non-numeric feature {row[pos]!r} "
                                f"in column {header[pos]!r}") from None

    labels = None
    label_names = None
    if label_pos is not None:
        raw = [row[label_pos] for row in rows]
        label_names = list(dict.fromkeys(raw))
        mapping = {v: i for i, v in enumerate(label_names)}
        labels = np.array([mapping[v] for v in raw], dtype=np.int64)

    if name is None:
        name = str(path).rsplit("/", 1)[-1].removesuffix(".csv")
    return Dataset(points, labels=labels, name=name, label_names=label_names)


def write_dataset_csv(ds: Dataset, path) -> None:
    """Emit the same CSV schema load_dataset consumes."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [f"x{i}" for i in range(ds.dim)]
        if ds.labels is not None:
            header.append("label")
        writer.writerow(header)
        for i in range(ds.n):
            row = [repr(float(v)) for v in ds.points[i]]
            if ds.labels is not None:
                row.append(str(int(ds.labels[i])))
            writer.writerow(row)
