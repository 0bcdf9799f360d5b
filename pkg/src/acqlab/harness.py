"""Experiment runner: multi-seed benchmark runs, metric aggregation and
CSV/JSON report emission, including per-constraint learning curves."""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import benchmarks
from .acquisition import AcquisitionConfig, Probe, Status, run
from .model import Constraint, Instance
from .oracle import SimulatedOracle
from .solver import SearchConfig


@dataclass
class ExperimentPlan:
    benchmark: str
    params: dict = field(default_factory=dict)
    config: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    runs: int = 10
    master_seed: int = 0
    curves: bool = False
    language_level: int = 1

    def seeds(self) -> list[int]:
        # simple deterministic derivation; each run gets an isolated stream
        return [self.master_seed * 1009 + i for i in range(self.runs)]

    def fingerprint(self) -> str:
        s = self.config.search
        return (
            f"{self.benchmark}|{sorted(self.params.items())}|"
            f"{self.config.algorithm.value}|fs{self.config.findscope_variant.value}|"
            f"{s.mode.value}|{s.var_heuristic.value}|{s.val_heuristic.value}|"
            f"cutmin={s.cut_min}|cutmax={s.cut_max}|runs={self.runs}|seed={self.master_seed}"
        )


class CurveProbe(Probe):
    """Samples (queries so far, |C_L|, elapsed seconds) after each learned
    constraint."""

    def __init__(self):
        self.samples: list[tuple[int, int, float]] = []
        self._n = 0

    def on_learned(self, c: Constraint, n_queries: int, elapsed: float) -> None:
        self._n += 1
        self.samples.append((n_queries, self._n, round(elapsed, 4)))


@dataclass
class RunReport:
    seed: int
    status: str
    metrics: dict
    learned: list[Constraint]
    curve: list[tuple[int, int, float]] = field(default_factory=list)


@dataclass
class ExperimentReport:
    plan: ExperimentPlan
    runs: list[RunReport]
    instance: Instance

    @property
    def any_collapse(self) -> bool:
        return any(r.status == Status.COLLAPSE.value for r in self.runs)

    def aggregate(self) -> dict:
        keys = [
            "learned_size",
            "total_queries",
            "avg_query_size",
            "complete_queries",
            "avg_wait",
            "max_wait",
            "time_to_last_query",
            "total_time",
            "cut_min_hits",
            "cut_max_hits",
            "fallback_hits",
        ]
        agg: dict = {"runs": len(self.runs)}
        for key in keys:
            values = [r.metrics[key] for r in self.runs]
            agg[f"{key}_mean"] = statistics.fmean(values)
            agg[f"{key}_std"] = statistics.pstdev(values) if len(values) > 1 else 0.0
        agg["statuses"] = {
            s: sum(1 for r in self.runs if r.status == s)
            for s in sorted({r.status for r in self.runs})
        }
        return agg

    def csv_rows(self) -> list[dict]:
        rows = []
        for r in self.runs:
            row = {
                "benchmark": self.plan.benchmark,
                "algorithm": self.plan.config.algorithm.value,
                "findscope": self.plan.config.findscope_variant.value,
                "qgen": self.plan.config.search.mode.value,
                "var": self.plan.config.search.var_heuristic.value,
                "val": self.plan.config.search.val_heuristic.value,
                "cut_min": self.plan.config.search.cut_min,
                "cut_max": self.plan.config.search.cut_max,
                "seed": r.seed,
                "status": r.status,
            }
            row.update(r.metrics)
            row["fingerprint"] = self.plan.fingerprint()
            rows.append(row)
        return rows

    def to_csv(self) -> str:
        rows = self.csv_rows()
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "plan": {
                "benchmark": self.plan.benchmark,
                "params": self.plan.params,
                "runs": self.plan.runs,
                "master_seed": self.plan.master_seed,
                "language_level": self.plan.language_level,
                "fingerprint": self.plan.fingerprint(),
            },
            "aggregate": self.aggregate(),
            "runs": [
                {
                    "seed": r.seed,
                    "status": r.status,
                    "metrics": r.metrics,
                    "learned": [
                        {"kind": c.kind.value, "scope": list(c.scope), "params": list(c.params)}
                        for c in r.learned
                    ],
                    "curve": [list(p) for p in r.curve],
                }
                for r in self.runs
            ],
        }

    def write(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if path.suffix == ".json":
            path.write_text(json.dumps(self.to_json(), indent=2) + "\n")
        else:
            path.write_text(self.to_csv())
            mirror = path.with_suffix(".json")
            mirror.write_text(json.dumps(self.to_json(), indent=2) + "\n")


def _config_with_seed(config: AcquisitionConfig, seed: int) -> AcquisitionConfig:
    s = config.search
    return AcquisitionConfig(
        algorithm=config.algorithm,
        findscope_variant=config.findscope_variant,
        search=SearchConfig(
            var_heuristic=s.var_heuristic,
            val_heuristic=s.val_heuristic,
            cut_min=s.cut_min,
            cut_max=s.cut_max,
            rng_seed=seed,
            mode=s.mode,
        ),
        background=config.background,
        multiacq_cutoff=config.multiacq_cutoff,
    )


def run_experiment(plan: ExperimentPlan, instance: Instance | None = None) -> ExperimentReport:
    """Run `plan.runs` seeded acquisitions of one benchmark; collapse in a
    run is recorded in its report row rather than raised."""
    reports: list[RunReport] = []
    inst = instance or benchmarks.build(
        plan.benchmark, language_level=plan.language_level, **plan.params
    )
    for seed in plan.seeds():
        # every run builds its own bias from the instance, so sharing is safe
        oracle = SimulatedOracle(inst.target, inst.vocabulary.n_variables)
        probe = CurveProbe() if plan.curves else None
        outcome = run(inst, oracle, _config_with_seed(plan.config, seed), probe)
        reports.append(
            RunReport(
                seed=seed,
                status=outcome.status.value,
                metrics=outcome.metrics.as_dict(),
                learned=list(outcome.learned),
                curve=probe.samples if probe else [],
            )
        )
    return ExperimentReport(plan=plan, runs=reports, instance=inst)
