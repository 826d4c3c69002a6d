"""Run reports, scaling experiments, and their rendered figures.

Reports are canonical JSON (stable key order, exact values as strings) so
identical configurations hash identically. Scaling sweeps emit a long-form
CSV with fixed columns plus a summary CSV with the fitted logarithmic
model, and render a queries-versus-items figure next to the data.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .core import Allocation, Instance, QueryLog, dumps_canonical
from .generators import make_instance
from .oracle import ExactOracle, TiePolicy
from .registry import REGISTRY, RunOutcome, run_algorithm
from .verify import MmsInfeasible, fairness_report

CSV_COLUMNS = ["algorithm", "n", "m", "seed", "queries", "verified"]


def run_report(algorithm: str, instance: Instance, outcome: RunOutcome,
               log: QueryLog, config: dict, alpha: Fraction = Fraction(1, 2),
               include_mms: bool = False) -> dict:
    """Full single-run report: allocation, per-agent query counts, verifier
    verdicts, and algorithm extras, in canonical JSON shape."""

    verdicts = fairness_report(instance, outcome.allocation, alpha=alpha,
                               include_mms=include_mms)
    return {
        "algorithm": algorithm,
        "config": config,
        "instance": instance.to_json(),
        "allocation": outcome.allocation.to_json(),
        "queries": {
            "total": log.total,
            "per_agent": {str(i): log.count_for(i) for i in range(instance.n)},
        },
        "verifiers": verdicts.to_json(),
        "extras": outcome.extras,
    }


@dataclass
class ScalingRow:
    algorithm: str
    n: int
    m: int
    seed: int
    queries: int
    verified: bool


def measure_scaling(algorithm: str, n: int, schedule: Sequence[int], seeds: int,
                    generator: str = "uniform",
                    tie_policy: TiePolicy = TiePolicy.FIRST_ARGUMENT,
                    verify: bool = False) -> list[ScalingRow]:
    """Query counts of one algorithm over an item-count schedule.

    Identical-valuation algorithms get identical copies of the generated
    profile. Verification is optional because brute-force checks cap m.
    """

    if list(schedule) != sorted(set(schedule)):
        raise ValueError("m schedule must be strictly increasing")
    identical = algorithm in ("prop1-identical", "ef1-identical")
    rows = []
    for m in schedule:
        for seed in range(seeds):
            inst = make_instance(generator, n, m, seed)
            if identical:
                inst = Instance(n=n, m=m,
                                valuations={i: dict(inst.valuations[0]) for i in range(n)})
            oracle = ExactOracle(inst, tie_policy=tie_policy, record_entries=False)
            outcome = run_algorithm(algorithm, n, range(m), oracle)
            verified = True
            if verify:
                from .verify import is_ef1, is_prop1

                check = is_ef1 if algorithm.startswith("ef1") else is_prop1
                verified = all(check(inst, outcome.allocation).values())
            rows.append(ScalingRow(algorithm, n, m, seed, oracle.log.total, verified))
    return rows


def summarize_scaling(rows: Sequence[ScalingRow]) -> list[dict]:
    """Per-m mean/max plus the least-squares fit queries ~ a*log2(m) + b."""
    by_m: dict[int, list[int]] = {}
    for row in rows:
        by_m.setdefault(row.m, []).append(row.queries)
    ms = sorted(by_m)
    means = [sum(by_m[m]) / len(by_m[m]) for m in ms]
    if len(ms) >= 2:
        a, b = np.polyfit([math.log2(m) for m in ms], means, 1)
    else:
        a, b = 0.0, means[0] if means else 0.0
    out = []
    for m, mean in zip(ms, means):
        fitted = a * math.log2(m) + b
        out.append({
            "m": m,
            "mean_queries": round(mean, 3),
            "max_queries": max(by_m[m]),
            "fitted": round(fitted, 3),
            "residual": round(mean - fitted, 3),
        })
    return out


def doubling_increments(summary: Sequence[dict]) -> list[tuple[int, int, float]]:
    """Mean-query increments between consecutive schedule points; roughly
    constant increments per doubling indicate logarithmic growth."""
    out = []
    for prev, cur in zip(summary, summary[1:]):
        out.append((prev["m"], cur["m"], round(cur["mean_queries"] - prev["mean_queries"], 3)))
    return out


def write_scaling_csv(rows: Sequence[ScalingRow], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow([r.algorithm, r.n, r.m, r.seed, r.queries, str(r.verified).lower()])


def write_summary_csv(summary: Sequence[dict], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "mean_queries", "max_queries", "fitted", "residual"])
        for row in summary:
            writer.writerow([row["m"], row["mean_queries"], row["max_queries"],
                             row["fitted"], row["residual"]])


def render_scaling_figure(rows: Sequence[ScalingRow], summary: Sequence[dict],
                          path: Path, algorithm: str, n: int) -> None:
    """Queries against item count on a log-x axis, with the fitted
    logarithmic model for reference."""

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ms = [row["m"] for row in summary]
    ax.plot(ms, [row["mean_queries"] for row in summary], "o-", label="mean")
    ax.plot(ms, [row["max_queries"] for row in summary], "s--", alpha=0.6, label="max")
    ax.plot(ms, [row["fitted"] for row in summary], ":", color="gray",
            label="a*log2(m)+b fit")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("items (m)")
    ax.set_ylabel("comparison queries")
    ax.set_title(f"{algorithm}, n={n}, {len({r.seed for r in rows})} seeds")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_run_figure(report: dict, path: Path) -> None:
    """Per-agent bundle sizes and query counts for a single run."""
    bundles = report["allocation"]["bundles"]
    agents = sorted(bundles, key=int)
    sizes = [len(bundles[a]) for a in agents]
    queries = [report["queries"]["per_agent"].get(a, 0) for a in agents]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(7.5, 3.2))
    ax1.bar(agents, sizes, color="tab:blue")
    ax1.set_title("bundle sizes")
    ax1.set_xlabel("agent")
    ax2.bar(agents, queries, color="tab:orange")
    ax2.set_title("queries answered")
    ax2.set_xlabel("agent")
    fig.suptitle(report["algorithm"])
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
