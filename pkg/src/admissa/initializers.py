"""Base-partition generators: k-means, single/average linkage, shared
nearest neighbor clustering and MST clustering, plus the population
protocol that sweeps k over {2..2k*}.

Every algorithm is deterministic given its seed; ties always resolve
toward smaller point indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, Partition, canonical_labels, _UnionFind
from .seeding import derive_seed, rng_for

SNN_GRID = {
    "knn_k": (5, 10),
    "eps": (1, 2, 3),
    "min_pts": (3, 5),
}


# --------------------------------------------------------------------------
# k-means


def _seed_centroids(ds: Dataset, k: int, rng: np.random.Generator) -> np.ndarray:
    """Distance-squared weighted random seeding over the data points."""
    n = ds.n
    chosen = [int(rng.integers(n))]
    d2 = ds.distances[chosen[0]] ** 2
    while len(chosen) < k:
        total = d2.sum()
        if total <= 0.0:
            # remaining mass is zero (duplicate-heavy data): first unchosen index
            mask = np.ones(n, dtype=bool)
            mask[chosen] = False
            nxt = int(np.flatnonzero(mask)[0])
        else:
            nxt = int(rng.choice(n, p=d2 / total))
        chosen.append(nxt)
        d2 = np.minimum(d2, ds.distances[nxt] ** 2)
    return ds.points[chosen].copy()


def lloyd_run(ds: Dataset, k: int, rng: np.random.Generator,
              max_iter: int = 100) -> tuple[Partition, list[float]]:
    """One Lloyd descent; returns the partition and the TWCV after each
    iteration (non-increasing). Emptied clusters are repaired by reseeding
    the centroid at the point farthest from its assigned centroid."""
    cents = _seed_centroids(ds, k, rng)
    assignment = None
    history: list[float] = []
    for _ in range(max_iter):
        diff = ds.points[:, None, :] - cents[None, :, :]
        d2 = np.einsum("nkd,nkd->nk", diff, diff)
        new_assignment = d2.argmin(axis=1)
        for _repair in range(k):
            counts = np.bincount(new_assignment, minlength=k)
            empty = np.flatnonzero(counts == 0)
            if empty.size == 0:
                break
            point_d2 = d2[np.arange(ds.n), new_assignment]
            # only steal from clusters with >= 2 members so none is emptied
            movable = counts[new_assignment] > 1
            far = int(np.where(movable, point_d2, -np.inf).argmax())
            cents[empty[0]] = ds.points[far]
            new_assignment[far] = empty[0]
            d2[:, empty[0]] = np.einsum(
                "nd,nd->n", ds.points - cents[empty[0]], ds.points - cents[empty[0]])
        for i in range(k):
            members = new_assignment == i
            cents[i] = ds.points[members].mean(axis=0)
        sq = ds.points - cents[new_assignment]
        history.append(float(np.einsum("nd,nd->", sq, sq)))
        if assignment is not None and np.array_equal(assignment, new_assignment):
            break
        assignment = new_assignment
    return Partition(canonical_labels(assignment)), history


def kmeans(ds: Dataset, k: int, seed: int, max_iter: int = 100,
           restarts: int = 5) -> Partition:
    """Best-of-``restarts`` Lloyd runs by TWCV (ties keep the earlier run)."""
    if not 2 <= k <= ds.n:
        raise ValueError(f"kmeans needs 2 <= k <= n, got k={k}, n={ds.n}")
    best = None
    best_twcv = np.inf
    for r in range(max(1, restarts)):
        rng = rng_for(seed, "kmeans-restart", r)
        part, history = lloyd_run(ds, k, rng, max_iter=max_iter)
        if history[-1] < best_twcv:
            best, best_twcv = part, history[-1]
    return best


# --------------------------------------------------------------------------
# Agglomerative linkage


def _linkage_snapshots(ds: Dataset, mode: str, wanted: set[int]) -> dict[int, Partition]:
    """Merge from singletons down to min(wanted); snapshot each wanted k.

    Cluster slots keep the smallest member index, so the tie rule "smallest
    involved indices" is the row-major argmin over the active matrix.
    """
    if mode not in ("single", "average"):
        raise ValueError(f"linkage mode must be 'single' or 'average', got {mode!r}")
    n = ds.n
    M = ds.distances.copy()
    np.fill_diagonal(M, np.inf)
    M[np.tril_indices(n)] = np.inf
    alive = np.ones(n, dtype=bool)
    sizes = np.ones(n, dtype=np.int64)
    labels = np.arange(n)
    out: dict[int, Partition] = {}
    k = n
    if k in wanted:
        out[k] = Partition(canonical_labels(labels))
    while k > max(1, min(wanted, default=1)):
        flat = int(M.argmin())
        a, b = divmod(flat, n)  # a < b, smallest tied pair in row-major order
        # merge b into a
        mask = alive.copy()
        mask[[a, b]] = False
        cols = np.flatnonzero(mask)
        da = np.where(cols > a, M[a, cols], M[cols, a])
        db_ = np.where(cols > b, M[b, cols], M[cols, b])
        if mode == "single":
            merged = np.minimum(da, db_)
        else:
            merged = (sizes[a] * da + sizes[b] * db_) / (sizes[a] + sizes[b])
        M[a, cols[cols > a]] = merged[cols > a]
        M[cols[cols < a], a] = merged[cols < a]
        M[b, :] = np.inf
        M[:, b] = np.inf
        sizes[a] += sizes[b]
        alive[b] = False
        labels[labels == labels[b]] = labels[a]
        k -= 1
        if k in wanted:
            out[k] = Partition(canonical_labels(labels))
    return out


def linkage(ds: Dataset, k: int, mode: str) -> Partition:
    """Agglomerative clustering cut at k clusters (single or average)."""
    if not 1 <= k <= ds.n:
        raise ValueError(f"linkage needs 1 <= k <= n, got k={k}, n={ds.n}")
    return _linkage_snapshots(ds, mode, {k})[k]


# --------------------------------------------------------------------------
# Shared nearest neighbor clustering


def snn_cluster(ds: Dataset, knn_k: int, eps: float, min_pts: int) -> Partition:
    """Density clustering on the shared-nearest-neighbor graph.

    Mutually kNN-linked pairs get a similarity equal to their shared
    neighbor count; points with at least ``min_pts`` links of similarity
    >= ``eps`` are core. Clusters are the components of the core subgraph;
    border points attach to their nearest qualifying core and everything
    else becomes a singleton so the partition stays total.
    """
    n = ds.n
    knn_k = max(1, min(int(knn_k), n - 1))
    nn = ds.neighbor_index[:, :knn_k]
    is_nn = np.zeros((n, n), dtype=bool)
    is_nn[np.repeat(np.arange(n), knn_k), nn.ravel()] = True
    linked = is_nn & is_nn.T
    shared = (is_nn.astype(np.int32) @ is_nn.T.astype(np.int32))
    strong = linked & (shared >= eps)
    density = strong.sum(axis=1)
    core = density >= min_pts

    uf = _UnionFind(n)
    ca, cb = np.nonzero(strong & core[:, None] & core[None, :])
    for a, b in zip(ca.tolist(), cb.tolist()):
        if a < b:
            uf.union(a, b)

    labels = np.full(n, -1, dtype=np.int64)
    next_label = 0
    roots: dict[int, int] = {}
    for p in range(n):
        if core[p]:
            r = uf.find(p)
            if r not in roots:
                roots[r] = next_label
                next_label += 1
            labels[p] = roots[r]
    for p in range(n):
        if labels[p] >= 0:
            continue
        candidates = np.flatnonzero(strong[p] & core)
        if candidates.size:
            nearest = candidates[np.argmin(ds.distances[p, candidates])]
            labels[p] = labels[nearest]
    for p in range(n):
        if labels[p] < 0:  # noise: its own singleton cluster
            labels[p] = next_label
            next_label += 1
    return Partition(canonical_labels(labels))


# --------------------------------------------------------------------------
# MST clustering


def interesting_mst_edges(ds: Dataset) -> list[tuple[int, int]]:
    """MST edges ordered by descending degree of interestingness.

    DI(a, b) = min(rank of b among a's neighbors, rank of a among b's);
    a high value means neither endpoint is a near neighbor of the other.
    Ties prefer the heavier edge, then the lexicographically smaller one.
    """
    edges = ds.mst_edges
    rank = ds.neighbor_rank
    di = np.minimum(rank[edges[:, 0], edges[:, 1]], rank[edges[:, 1], edges[:, 0]])
    w = ds.distances[edges[:, 0], edges[:, 1]]
    order = sorted(range(len(edges)),
                   key=lambda e: (-di[e], -w[e], int(edges[e, 0]), int(edges[e, 1])))
    return [(int(edges[e, 0]), int(edges[e, 1])) for e in order]


def _mst_partition_sweep(ds: Dataset, wanted: set[int]) -> dict[int, Partition]:
    """Partitions for several k in one pass: add MST edges from least to
    most interesting and snapshot whenever the component count hits a
    wanted k."""
    ranked = interesting_mst_edges(ds)
    uf = _UnionFind(ds.n)
    count = ds.n
    out: dict[int, Partition] = {}

    def snapshot() -> Partition:
        labels = np.fromiter((uf.find(i) for i in range(ds.n)), dtype=np.int64)
        return Partition(canonical_labels(labels))

    if count in wanted:
        out[count] = snapshot()
    for a, b in reversed(ranked):
        if uf.union(a, b):
            count -= 1
            if count in wanted:
                out[count] = snapshot()
    return out


def mst_cluster(ds: Dataset, k: int) -> Partition:
    """Remove the k-1 most interesting MST edges; components are clusters."""
    if not 1 <= k <= ds.n:
        raise ValueError(f"mst_cluster needs 1 <= k <= n, got k={k}, n={ds.n}")
    return _mst_partition_sweep(ds, {k})[k]


# --------------------------------------------------------------------------
# Population protocol

ALGORITHMS = ("km", "al", "sl", "snn", "mst")


@dataclass
class InitPopulation:
    """Base partitions from one initialization algorithm.

    SNN members whose threshold-driven k falls outside {2..2k*} are kept
    but flagged ``out_of_range`` rather than silently dropped.
    """

    source: str
    dataset: str
    k_star: int
    master_seed: int
    partitions: list[Partition] = field(default_factory=list)
    seeds: list[int | None] = field(default_factory=list)
    params: list[dict] = field(default_factory=list)
    out_of_range: list[bool] = field(default_factory=list)

    def add(self, pi: Partition, seed: int | None, params: dict, in_range: bool):
        key = pi.key()
        if any(p.key() == key for p in self.partitions):
            return
        self.partitions.append(pi.canonical())
        self.seeds.append(seed)
        self.params.append(params)
        self.out_of_range.append(not in_range)

    def to_json(self) -> str:
        doc = {
            "source": self.source,
            "dataset": self.dataset,
            "k_star": self.k_star,
            "master_seed": self.master_seed,
            "partitions": [
                {
                    "assignment": p.assignment.tolist(),
                    "k": p.k,
                    "seed": s,
                    "params": prm,
                    "out_of_range": oor,
                }
                for p, s, prm, oor in zip(self.partitions, self.seeds,
                                          self.params, self.out_of_range)
            ],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "InitPopulation":
        doc = json.loads(text)
        pop = cls(source=doc["source"], dataset=doc["dataset"],
                  k_star=doc["k_star"], master_seed=doc["master_seed"])
        for rec in doc["partitions"]:
            pop.partitions.append(Partition(np.array(rec["assignment"], dtype=np.int64)))
            pop.seeds.append(rec["seed"])
            pop.params.append(rec["params"])
            pop.out_of_range.append(rec["out_of_range"])
        return pop


def generate_population(ds: Dataset, algorithm: str, k_star: int | None = None,
                        master_seed: int = 0) -> InitPopulation:
    """One partition per k in {2..2k*} (km/al/sl/mst), or a fixed threshold
    grid sweep for snn. Duplicates (up to relabeling) are removed."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown initializer {algorithm!r}")
    if k_star is None:
        k_star = ds.k_star
    if k_star is None:
        raise ValueError("k_star unknown: dataset has no labels and none was given")
    k_max = 2 * k_star
    if k_max > ds.n:
        raise ValueError(f"2*k_star={k_max} exceeds n={ds.n}")
    ks = list(range(2, k_max + 1)) or [2]

    pop = InitPopulation(source=algorithm, dataset=ds.name, k_star=k_star,
                         master_seed=master_seed)
    if algorithm == "km":
        for k in ks:
            seed = derive_seed(master_seed, "init-km", ds.name, k)
            pop.add(kmeans(ds, k, seed=seed), seed, {"k": k}, True)
    elif algorithm in ("al", "sl"):
        mode = "average" if algorithm == "al" else "single"
        snaps = _linkage_snapshots(ds, mode, set(ks))
        for k in ks:
            pop.add(snaps[k], None, {"k": k, "mode": mode}, True)
    elif algorithm == "mst":
        snaps = _mst_partition_sweep(ds, set(ks))
        for k in ks:
            pop.add(snaps[k], None, {"k": k}, True)
    else:  # snn
        for knn_k in SNN_GRID["knn_k"]:
            for eps in SNN_GRID["eps"]:
                for min_pts in SNN_GRID["min_pts"]:
                    pi = snn_cluster(ds, knn_k, eps, min_pts)
                    params = {"knn_k": knn_k, "eps": eps, "min_pts": min_pts,
                              "k": pi.k}
                    pop.add(pi, None, params, 2 <= pi.k <= k_max)
    order = sorted(range(len(pop.partitions)),
                   key=lambda i: (pop.partitions[i].k, i))
    pop.partitions = [pop.partitions[i] for i in order]
    pop.seeds = [pop.seeds[i] for i in order]
    pop.params = [pop.params[i] for i in order]
    pop.out_of_range = [pop.out_of_range[i] for i in order]
    return pop
