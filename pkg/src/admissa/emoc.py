"""Delta-locus evolutionary multi-objective clustering.

The genotype fixes most of the MST and exposes only the most interesting
links as evolvable loci: gene i may cut its link (g_i = i), keep the MST
parent, or redirect to one of i's L nearest neighbors. Selection is
elitist non-dominated sorting with crowding-distance tie-breaks; all
comparisons reuse the shared strictness tolerance so fronts agree with
the admissibility dominance operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .admissibility import dominates
from .criteria import (ABS_FLOOR, REL_TOL, CriterionError, ObjectiveSpec,
                       ObjectiveVector, evaluate_vector)
from .data import Dataset, Partition, canonical_labels, _UnionFind
from .initializers import InitPopulation, interesting_mst_edges
from .seeding import rng_for


class EmocError(RuntimeError):
    pass


@dataclass
class EmocConfig:
    objectives: tuple[ObjectiveSpec, ...]
    population_size: int = 100
    generations: int = 100
    crossover_prob: float = 0.5
    mutation_prob: float | None = None  # default 1/|relevant loci|
    seed: int = 0
    L: int = 10
    delta_percent: float | None = None  # default locus count: ceil(5*sqrt(n))
    track_history: bool = False
    debug_invariants: bool = False

    def __post_init__(self):
        self.objectives = tuple(self.objectives)
        if len(self.objectives) < 2:
            raise ValueError("need at least 2 objectives")
        if self.population_size < 4 or self.population_size % 2:
            raise ValueError("population_size must be even and >= 4")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        for p in (self.crossover_prob, self.mutation_prob):
            if p is not None and not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")


@dataclass(eq=False)
class DeltaScheme:
    """Shared genotype structure for one dataset: which MST links evolve,
    each locus's gene domain, and the components induced by the fixed
    links."""

    n: int
    relevant_loci: np.ndarray  # child endpoints of the top-DI MST edges
    fixed_edges: list[tuple[int, int]]
    parent: np.ndarray  # MST parent per node (root -> itself)
    domains: list[np.ndarray]  # per relevant locus: {i, parent, NN_L(i)}
    base_labels: np.ndarray  # components of the fixed-edge subgraph
    n_base: int

    def locus_pos(self, point: int) -> int:
        return int(np.searchsorted(self.relevant_loci, point))


def _root_mst(ds: Dataset) -> np.ndarray:
    """Parent array from a BFS rooted at node 0, visiting lower-index
    neighbors first."""
    adj: list[list[int]] = [[] for _ in range(ds.n)]
    for a, b in ds.mst_edges:
        adj[a].append(int(b))
        adj[b].append(int(a))
    for lst in adj:
        lst.sort()
    parent = np.full(ds.n, -1, dtype=np.int64)
    parent[0] = 0
    queue = [0]
    while queue:
        node = queue.pop(0)
        for nb in adj[node]:
            if parent[nb] < 0:
                parent[nb] = node
                queue.append(nb)
    return parent


def delta_relevant_loci(ds: Dataset, delta_percent: float | None = None,
                        L: int = 10) -> DeltaScheme:
    """Pick the evolvable loci: child endpoints of the most interesting
    MST edges. With ``delta_percent`` given, ceil(delta/100 * n) edges are
    relevant; otherwise ceil(5*sqrt(n)). Both are capped at n-1."""
    if delta_percent is not None and not 0.0 < delta_percent <= 100.0:
        raise ValueError("delta_percent must lie in (0, 100]")
    n = ds.n
    if delta_percent is None:
        count = int(np.ceil(5.0 * np.sqrt(n)))
    else:
        count = int(np.ceil(delta_percent / 100.0 * n))
    count = min(count, n - 1)
    ranked = interesting_mst_edges(ds)
    parent = _root_mst(ds)

    def child_of(a: int, b: int) -> int:
        return a if parent[a] == b else b

    relevant = sorted(child_of(a, b) for a, b in ranked[:count])
    fixed = [(child_of(a, b), int(parent[child_of(a, b)]))
             for a, b in ranked[count:]]

    L_eff = max(1, min(int(L), n - 1))
    domains = []
    for i in relevant:
        dom = [i, int(parent[i])]
        dom.extend(int(v) for v in ds.neighbor_index[i, :L_eff])
        domains.append(np.array(list(dict.fromkeys(dom)), dtype=np.int64))

    uf = _UnionFind(n)
    for a, b in fixed:
        uf.union(a, b)
    base = canonical_labels(np.fromiter((uf.find(i) for i in range(n)),
                                        dtype=np.int64))
    return DeltaScheme(n=n, relevant_loci=np.array(relevant, dtype=np.int64),
                       fixed_edges=fixed, parent=parent, domains=domains,
                       base_labels=base, n_base=int(base.max()) + 1)


@dataclass(eq=False)
class Genotype:
    scheme: DeltaScheme
    genes: np.ndarray  # one target point index per relevant locus

    def copy(self) -> "Genotype":
        return Genotype(self.scheme, self.genes.copy())

    @property
    def relevant_loci(self) -> np.ndarray:
        return self.scheme.relevant_loci

    @property
    def fixed_edges(self) -> list[tuple[int, int]]:
        return self.scheme.fixed_edges


def decode(g: Genotype, ds: Dataset) -> Partition:
    """Connected components of fixed links plus the non-self gene links."""
    if ds.n != g.scheme.n:
        raise ValueError("genotype and dataset sizes differ")
    sch = g.scheme
    uf = _UnionFind(sch.n_base)
    for locus, gene in zip(sch.relevant_loci.tolist(), g.genes.tolist()):
        if gene != locus:
            uf.union(int(sch.base_labels[locus]), int(sch.base_labels[gene]))
    comp = np.fromiter((uf.find(int(c)) for c in sch.base_labels),
                       dtype=np.int64, count=sch.n)
    return Partition(canonical_labels(comp))


def encode(pi: Partition, scheme: DeltaScheme) -> Genotype:
    """Genotype whose loci follow the MST parent when co-clustered with it
    and cut otherwise. Decoding reproduces ``pi`` exactly when all of its
    cut MST edges are relevant loci."""
    genes = np.empty(len(scheme.relevant_loci), dtype=np.int64)
    labels = pi.assignment
    for pos, locus in enumerate(scheme.relevant_loci.tolist()):
        par = int(scheme.parent[locus])
        genes[pos] = par if labels[locus] == labels[par] else locus
    return Genotype(scheme, genes)


def variation(parent1: Genotype, parent2: Genotype, config: EmocConfig,
              rng: np.random.Generator) -> tuple[Genotype, Genotype]:
    """Per-locus uniform crossover followed by uniform domain-reset
    mutation."""
    if parent1.scheme is not parent2.scheme:
        raise ValueError("parents use different locus schemes")
    sch = parent1.scheme
    n_loci = len(sch.relevant_loci)
    swap = rng.random(n_loci) < config.crossover_prob
    child1 = np.where(swap, parent2.genes, parent1.genes)
    child2 = np.where(swap, parent1.genes, parent2.genes)
    mut_prob = config.mutation_prob
    if mut_prob is None:
        mut_prob = 1.0 / max(1, n_loci)
    for genes in (child1, child2):
        hits = np.flatnonzero(rng.random(n_loci) < mut_prob)
        for pos in hits:
            dom = sch.domains[pos]
            genes[pos] = dom[rng.integers(len(dom))]
    return Genotype(sch, child1), Genotype(sch, child2)


def mutate(g: Genotype, prob: float, rng: np.random.Generator) -> Genotype:
    genes = g.genes.copy()
    hits = np.flatnonzero(rng.random(len(genes)) < prob)
    for pos in hits:
        dom = g.scheme.domains[pos]
        genes[pos] = dom[rng.integers(len(dom))]
    return Genotype(g.scheme, genes)


# --------------------------------------------------------------------------
# Non-dominated sorting machinery


def domination_matrix(values: np.ndarray) -> np.ndarray:
    """dom[i, j] is True when row i dominates row j (rows already
    normalized to minimization), with the shared tolerance."""
    a = values[:, None, :]
    b = values[None, :, :]
    tol = np.maximum(REL_TOL * np.maximum(np.abs(a), np.abs(b)), ABS_FLOOR)
    no_worse = a <= b + tol
    better = a < b - tol
    return no_worse.all(axis=2) & better.any(axis=2)


def fast_nondominated_sort(values: np.ndarray) -> list[np.ndarray]:
    """Fronts (arrays of row indices) from best to worst."""
    dom = domination_matrix(values)
    dominated_by = dom.sum(axis=0)
    fronts = []
    remaining = np.ones(len(values), dtype=bool)
    while remaining.any():
        front = np.flatnonzero(remaining & (dominated_by == 0))
        if front.size == 0:  # tolerance produced a cycle; take the rest
            front = np.flatnonzero(remaining)
        fronts.append(front)
        remaining[front] = False
        dominated_by = dominated_by - dom[front].sum(axis=0)
    return fronts


def crowding_distance(values: np.ndarray) -> np.ndarray:
    n, z = values.shape
    dist = np.zeros(n)
    if n <= 2:
        return np.full(n, np.inf)
    for m in range(z):
        order = np.argsort(values[:, m], kind="stable")
        lo, hi = values[order[0], m], values[order[-1], m]
        dist[order[0]] = dist[order[-1]] = np.inf
        if hi - lo <= 0:
            continue
        gaps = (values[order[2:], m] - values[order[:-2], m]) / (hi - lo)
        dist[order[1:-1]] += gaps
    return dist


@dataclass(eq=False)
class Individual:
    genotype: Genotype
    partition: Partition
    vector: ObjectiveVector | None  # None when a criterion error disqualified it
    rank: int = 0
    crowding: float = 0.0


@dataclass
class FrontMember:
    genotype: Genotype
    partition: Partition
    vector: ObjectiveVector


@dataclass
class ParetoFront:
    members: list[FrontMember]
    history: list[dict] | None = None

    def __len__(self) -> int:
        return len(self.members)

    def vectors(self) -> list[ObjectiveVector]:
        return [m.vector for m in self.members]


def _evaluate_individual(ds: Dataset, g: Genotype, specs) -> Individual:
    pi = decode(g, ds)
    try:
        vec = evaluate_vector(ds, pi, specs)
    except CriterionError:
        vec = None
    return Individual(g, pi, vec)


def _rank_population(pop: list[Individual]) -> list[list[Individual]]:
    """Assign ranks and crowding; disqualified members get the worst rank.
    Returns the feasible fronts."""
    feasible = [ind for ind in pop if ind.vector is not None]
    infeasible = [ind for ind in pop if ind.vector is None]
    fronts_out: list[list[Individual]] = []
    if feasible:
        values = np.array([ind.vector.minimized() for ind in feasible])
        fronts = fast_nondominated_sort(values)
        for r, front in enumerate(fronts):
            dist = crowding_distance(values[front])
            for pos, idx in enumerate(front):
                feasible[idx].rank = r
                feasible[idx].crowding = float(dist[pos])
            fronts_out.append([feasible[i] for i in front])
    for ind in infeasible:
        ind.rank = len(fronts_out) + len(pop)
        ind.crowding = 0.0
    return fronts_out


def _truncate(pop: list[Individual], size: int) -> list[Individual]:
    order = sorted(range(len(pop)),
                   key=lambda i: (pop[i].rank, -pop[i].crowding, i))
    return [pop[i] for i in order[:size]]


def _tournament(pop: list[Individual], rng: np.random.Generator) -> Individual:
    i, j = rng.integers(len(pop), size=2)
    a, b = pop[int(i)], pop[int(j)]
    if (a.rank, -a.crowding) <= (b.rank, -b.crowding):
        return a
    return b


def _front_members(pop: list[Individual]) -> list[FrontMember]:
    best = [ind for ind in pop if ind.vector is not None and ind.rank == 0]
    seen: set[bytes] = set()
    members = []
    for ind in best:
        key = ind.partition.key()
        if key in seen:
            continue
        seen.add(key)
        members.append(FrontMember(ind.genotype, ind.partition, ind.vector))
    return members


def evolve(ds: Dataset, config: EmocConfig, init: InitPopulation) -> ParetoFront:
    """Run the evolutionary clusterer seeded from an initial population.

    Individuals whose objective vector cannot be evaluated (criterion
    errors such as k=1 under a separation index) are kept with worst-rank
    fitness instead of aborting the run."""
    if not init.partitions:
        raise EmocError("initial population is empty")
    scheme = delta_relevant_loci(ds, config.delta_percent, L=config.L)
    rng = rng_for(config.seed, "emoc")
    specs = config.objectives

    genotypes = [encode(pi, scheme) for pi in init.partitions]
    mut_prob = config.mutation_prob
    if mut_prob is None:
        mut_prob = 1.0 / max(1, len(scheme.relevant_loci))
    i = 0
    while len(genotypes) < config.population_size:
        genotypes.append(mutate(genotypes[i % len(init.partitions)], mut_prob, rng))
        i += 1

    pop = [_evaluate_individual(ds, g, specs) for g in genotypes]
    if all(ind.vector is None for ind in pop):
        raise EmocError("every initial individual was disqualified")
    _rank_population(pop)
    pop = _truncate(pop, config.population_size)
    _rank_population(pop)

    history: list[dict] = []

    def record():
        if not (config.track_history or config.debug_invariants):
            return
        feas = [ind for ind in pop if ind.vector is not None]
        values = np.array([ind.vector.minimized() for ind in feas])
        front_values = [list(ind.vector.values) for ind in feas if ind.rank == 0]
        entry = {"best": values.min(axis=0).tolist(),
                 "front_size": len(front_values),
                 "front_values": front_values}
        history.append(entry)
        if config.debug_invariants:
            front = [ind for ind in feas if ind.rank == 0]
            for x in range(len(front)):
                for y in range(len(front)):
                    if x != y and dominates(front[x].vector, front[y].vector):
                        raise AssertionError("front members must be mutually non-dominated")

    record()
    for _gen in range(config.generations):
        offspring: list[Individual] = []
        while len(offspring) < config.population_size:
            p1 = _tournament(pop, rng)
            p2 = _tournament(pop, rng)
            c1, c2 = variation(p1.genotype, p2.genotype, config, rng)
            offspring.append(_evaluate_individual(ds, c1, specs))
            offspring.append(_evaluate_individual(ds, c2, specs))
        combined = pop + offspring
        _rank_population(combined)
        pop = _truncate(combined, config.population_size)
        _rank_population(pop)
        record()

    members = _front_members(pop)
    return ParetoFront(members=members,
                       history=history if (config.track_history or
                                           config.debug_invariants) else None)


def truth_dominated(front: ParetoFront, truth_vector: ObjectiveVector) -> bool:
    """Does any front member dominate the true partition's vector?"""
    return any(dominates(m.vector, truth_vector) for m in front.members)
