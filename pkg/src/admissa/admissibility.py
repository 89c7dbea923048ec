"""Admissibility classification of clustering objectives.

For a given initializer, each (dataset, objective) cell is classified:

  - ``inadmissible``: some base partition other than the truth already
    scores strictly better than the true partition, so optimizing the
    objective steers the search away from it (rendered as an x),
  - ``optimal_in_init``: the true partition itself appears in the base
    population, so there is nothing left to optimize (rendered as a check),
  - ``admissible``: neither holds; optimizing can still move toward the
    truth (rendered blank).

When both conditions hold, inadmissible wins: a strictly better non-truth
partition proves the misleading search direction even if the truth is
also present.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .criteria import (MINIMIZE, ObjectiveSpec, ObjectiveVector,
                       CriterionError, ABS_FLOOR, REL_TOL, evaluate,
                       strictly_better)
from .data import Dataset, Partition
from .initializers import InitPopulation, generate_population

INADMISSIBLE = "inadmissible"
OPTIMAL_IN_INIT = "optimal_in_init"
ADMISSIBLE = "admissible"

SYMBOLS = {INADMISSIBLE: "×", OPTIMAL_IN_INIT: "✓", ADMISSIBLE: ""}


def dominates(u: ObjectiveVector, v: ObjectiveVector) -> bool:
    """Pareto dominance: u no worse everywhere and strictly better
    somewhere, under the shared strictness tolerance."""
    if u.specs != v.specs:
        raise ValueError("objective vectors have different spec lists")
    a = u.minimized()
    b = v.minimized()
    tol = np.maximum(REL_TOL * np.maximum(np.abs(a), np.abs(b)), ABS_FLOOR)
    return bool(np.all(a <= b + tol) and np.any(a < b - tol))


@dataclass(frozen=True)
class AdmissibilityVerdict:
    objective: str
    dataset: str
    initializer: str
    verdict: str
    witness: int | None  # population index proving the verdict
    margin: float  # best base value minus true value, signed by direction


def classify_objective(values, true_value: float, direction: str,
                       truth_found: bool) -> tuple[str, int | None, float]:
    """Classify one (dataset, objective) cell from base-partition values.

    ``values`` are the evaluable base partitions (the truth itself should
    be excluded by the caller). Returns (verdict, witness index into
    values, margin)."""
    values = list(values)
    if not values:
        raise ValueError("classify_objective needs at least one base value")
    if direction == MINIMIZE:
        best_idx = int(np.argmin(values))
        margin = true_value - values[best_idx]
    else:
        best_idx = int(np.argmax(values))
        margin = values[best_idx] - true_value
    if strictly_better(values[best_idx], true_value, direction):
        return INADMISSIBLE, best_idx, margin
    if truth_found:
        return OPTIMAL_IN_INIT, None, margin
    return ADMISSIBLE, None, margin


@dataclass
class AdmissibilityTable:
    """Verdict matrix over (dataset x objective) for one initializer."""

    initializer: str
    dataset_names: list[str]
    specs: list[ObjectiveSpec]
    cells: list[list[AdmissibilityVerdict | None]] = field(default_factory=list)
    skips: list[str] = field(default_factory=list)

    def summary(self) -> dict[str, tuple[int, int]]:
        """Per objective: (IN, OP) = counts of inadmissible and
        optimal-in-init datasets."""
        out: dict[str, tuple[int, int]] = {}
        for j, spec in enumerate(self.specs):
            col = [row[j] for row in self.cells]
            n_in = sum(1 for v in col if v is not None and v.verdict == INADMISSIBLE)
            n_op = sum(1 for v in col if v is not None and v.verdict == OPTIMAL_IN_INIT)
            out[spec.id] = (n_in, n_op)
        return out

    def to_csv(self) -> str:
        lines = ["dataset," + ",".join(s.id for s in self.specs)]
        for name, row in zip(self.dataset_names, self.cells):
            symbols = [SYMBOLS[v.verdict] if v is not None else "skip" for v in row]
            lines.append(name + "," + ",".join(symbols))
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        head = "| dataset | " + " | ".join(s.id for s in self.specs) + " |"
        sep = "|" + "---|" * (len(self.specs) + 1)
        lines = [head, sep]
        for name, row in zip(self.dataset_names, self.cells):
            symbols = [SYMBOLS[v.verdict] if v is not None else "skip" for v in row]
            lines.append("| " + name + " | " + " | ".join(symbols) + " |")
        return "\n".join(lines) + "\n"

    def to_records(self) -> dict:
        return {
            "initializer": self.initializer,
            "datasets": self.dataset_names,
            "objectives": [s.id for s in self.specs],
            "cells": [
                [
                    None if v is None else {
                        "objective": v.objective,
                        "dataset": v.dataset,
                        "initializer": v.initializer,
                        "verdict": v.verdict,
                        "witness": v.witness,
                        "margin": v.margin,
                    }
                    for v in row
                ]
                for row in self.cells
            ],
            "summary": {k: {"IN": v[0], "OP": v[1]}
                        for k, v in self.summary().items()},
            "skips": self.skips,
        }


def classify_cell(ds: Dataset, pop: InitPopulation, spec: ObjectiveSpec,
                  initializer: str,
                  truth: Partition | None = None) -> tuple[AdmissibilityVerdict | None, list[str]]:
    """Classify one dataset under one objective given its base population.

    Base partitions that raise a criterion error are skipped (recorded);
    partitions identical to the truth are excluded from the strictness test
    but set the truth-found flag."""
    skips: list[str] = []
    if truth is None:
        truth = ds.true_partition()
    try:
        true_value = evaluate(ds, truth, spec)
    except CriterionError as err:
        skips.append(f"{ds.name}/{spec.id}: true partition not evaluable ({err})")
        return None, skips

    values: list[float] = []
    origin: list[int] = []
    truth_found = False
    for idx, pi in enumerate(pop.partitions):
        if pi.same_as(truth):
            truth_found = True
            continue
        try:
            values.append(evaluate(ds, pi, spec))
            origin.append(idx)
        except CriterionError as err:
            skips.append(f"{ds.name}/{spec.id}: partition {idx} skipped ({err})")
    if not values:
        skips.append(f"{ds.name}/{spec.id}: no evaluable base partition")
        if truth_found:
            verdict = AdmissibilityVerdict(spec.id, ds.name, initializer,
                                           OPTIMAL_IN_INIT, None, 0.0)
            return verdict, skips
        return None, skips

    verdict_kind, witness, margin = classify_objective(
        values, true_value, spec.direction, truth_found)
    witness_idx: int | None = None
    if verdict_kind == INADMISSIBLE:
        witness_idx = origin[witness]
    elif verdict_kind == OPTIMAL_IN_INIT:
        witness_idx = next(i for i, pi in enumerate(pop.partitions)
                           if pi.same_as(truth))
    return AdmissibilityVerdict(spec.id, ds.name, initializer, verdict_kind,
                                witness_idx, margin), skips


def build_admissibility_table(datasets, initializer: str, specs,
                              master_seed: int = 0,
                              populations=None) -> AdmissibilityTable:
    """Full verdict matrix for one initializer over a dataset suite.

    Populations are generated on demand unless supplied (one per dataset,
    aligned with ``datasets``)."""
    datasets = list(datasets)
    specs = list(specs)
    table = AdmissibilityTable(initializer=initializer,
                               dataset_names=[ds.name for ds in datasets],
                               specs=specs)
    for i, ds in enumerate(datasets):
        truth = ds.true_partition()  # raises if labels are missing
        if populations is not None:
            pop = populations[i]
        else:
            pop = generate_population(ds, initializer, master_seed=master_seed)
        row: list[AdmissibilityVerdict | None] = []
        for spec in specs:
            verdict, skips = classify_cell(ds, pop, spec, initializer, truth)
            row.append(verdict)
            table.skips.extend(skips)
        table.cells.append(row)
    return table
