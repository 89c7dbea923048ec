#!/usr/bin/env python3
"""Optimize one objective pair on one generated dataset and print the
resulting front: objective values, cluster counts and agreement with the
ground truth. Handy for eyeballing how a pair behaves before committing
to a full campaign.

Usage:
    python scripts/explore_front.py --archetype elongated --kind spiral \
        --n 600 --pair var con --generations 50
"""

import argparse
import sys

from admissa import (EmocConfig, ari, evaluate_vector, evolve, gen_blobs,
                     gen_elongated, gen_mixed, gen_nested,
                     generate_population, objectives, truth_dominated)


def build_dataset(args):
    if args.archetype == "gaussian_blobs":
        return gen_blobs(args.k_star, args.n // args.k_star, args.separation,
                         seed=args.seed)
    if args.archetype == "elongated":
        return gen_elongated(args.kind, args.n, seed=args.seed)
    if args.archetype == "nested":
        return gen_nested(args.level, seed=args.seed, n=args.n)
    return gen_mixed(args.recipe, seed=args.seed, n=args.n)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--archetype", default="elongated",
                        choices=["gaussian_blobs", "elongated", "nested", "mixed"])
    parser.add_argument("--kind", default="spiral", choices=["long", "spiral"])
    parser.add_argument("--recipe", default="3mc")
    parser.add_argument("--level", type=int, default=1)
    parser.add_argument("--k-star", type=int, default=4)
    parser.add_argument("--separation", type=float, default=10.0)
    parser.add_argument("--n", type=int, default=600)
    parser.add_argument("--pair", nargs=2, default=["var", "con"])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--generations", type=int, default=50)
    parser.add_argument("--population", type=int, default=100)
    args = parser.parse_args()

    ds = build_dataset(args)
    truth = ds.true_partition()
    pop = generate_population(ds, "mst", master_seed=args.seed)
    specs = objectives(*args.pair)
    cfg = EmocConfig(objectives=specs, population_size=args.population,
                     generations=args.generations, seed=args.seed)
    front = evolve(ds, cfg, pop)

    print(f"dataset {ds.name}: n={ds.n} k*={ds.k_star}")
    print(f"pair {args.pair}, {len(front)} front members:")
    header = "  ".join(f"{s.id:>10}" for s in specs)
    print(f"  {'k':>3}  {header}  {'ari':>7}")
    for m in sorted(front.members, key=lambda m: m.partition.k):
        values = "  ".join(f"{v:>10.4f}" for v in m.vector.values)
        print(f"  {m.partition.k:>3}  {values}  {ari(m.partition, truth):>7.4f}")
    try:
        tv = evaluate_vector(ds, truth, specs)
        print(f"truth vector: {[round(v, 4) for v in tv.values]}; "
              f"dominated by front: {truth_dominated(front, tv)}")
    except Exception as err:
        print(f"truth vector not evaluable: {err}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
