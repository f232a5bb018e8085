"""
Batch harnesses behind `edsolve compare` and `edsolve bench`.

Instances are generated from a single seed in a fixed order and processed
sequentially, so summaries and tables are reproducible.
"""

import collections
import dataclasses
import logging
import time
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import dataclasses_json
import numpy as np
from tqdm import tqdm

from edsolve.data import generators
from edsolve.graph.graph_core import BipartiteGraph
from edsolve.solver import solver_driver
from edsolve.solver.solver_config import SolverConfig
from edsolve.solver.solver_driver import CompareReport

logger = logging.getLogger(__name__)

COMPARE_PROBABILITIES = (0.1, 0.2, 0.3)
BENCH_HEADER = ("size", "seed", "n", "m", "found", "seconds")


@dataclasses.dataclass
class CompareSummary(dataclasses_json.DataClassJsonMixin):
    count: int = 0
    agree: int = 0
    driver_valid: int = 0
    solved: int = 0
    skipped: int = 0
    branches: Dict[str, int] = dataclasses.field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.agree == self.count and self.driver_valid == self.count

    def lines(self) -> List[str]:
        branches = " ".join(f"{k}={v}" for k, v in sorted(self.branches.items()))
        return [
            f"instances {self.count}",
            f"agree {self.agree}/{self.count}",
            f"valid {self.driver_valid}/{self.count}",
            f"solved {self.solved}",
            f"skipped {self.skipped}",
            f"branches {branches}".rstrip(),
        ]


@dataclasses.dataclass
class BenchRow(dataclasses_json.DataClassJsonMixin):
    size: int
    seed: int
    n: int
    m: int
    found: bool
    seconds: float

    def to_tsv(self) -> str:
        return "\t".join(
            [
                str(self.size),
                str(self.seed),
                str(self.n),
                str(self.m),
                "1" if self.found else "0",
                f"{self.seconds:.4f}",
            ]
        )


def compare_instances(
    count: int, seed: int, max_n: int
) -> Iterator[Tuple[int, Optional[BipartiteGraph]]]:
    """
    `count` seeded S(1,1,5)-free graphs with 2 <= n <= max_n, as (instance seed,
    graph). The graph is None when rejection sampling gave up on that seed.
    """
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    if max_n < 2:
        raise ValueError(f"max_n must be at least 2, got {max_n}")
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(2, max_n + 1))
        nx = int(rng.integers(1, n))
        p = float(rng.choice(COMPARE_PROBABILITIES))
        instance_seed = int(rng.integers(2**31))
        try:
            g, _ = generators.gen_s115_free(nx, n - nx, p, seed=instance_seed)
        except generators.TriesExhausted:
            logger.warning(f"no S(1,1,5)-free sample for seed {instance_seed}")
            yield instance_seed, None
            continue
        yield instance_seed, g


def run_compare(
    count: int,
    seed: int,
    max_n: int,
    config: Optional[SolverConfig] = None,
    progress: bool = True,
) -> Tuple[CompareSummary, List[CompareReport]]:
    config = config or SolverConfig()
    summary = CompareSummary()
    reports: List[CompareReport] = []
    branches: collections.Counter = collections.Counter()
    start = time.perf_counter()
    instances = tqdm(
        compare_instances(count, seed, max_n),
        total=count,
        desc="compare",
        disable=not progress,
    )
    for instance_seed, g in instances:
        if g is None:
            summary.skipped += 1
            continue
        report = solver_driver.solve_compare(g, config)
        reports.append(report)
        summary.count += 1
        summary.agree += report.agree
        summary.driver_valid += report.driver_valid
        summary.solved += report.driver is not None
        branches.update(report.branches)
        if not report.agree:
            logger.warning(
                f"disagreement on seed {instance_seed}: driver={report.driver} "
                f"oracle={report.oracle} edges={g.edges()}"
            )
    summary.branches = dict(branches)
    summary.seconds = time.perf_counter() - start
    logger.info(
        f"compare: {summary.agree}/{summary.count} agree in {summary.seconds:.1f}s"
    )
    return summary, reports


def bench_instance(size: int, seed: int) -> BipartiteGraph:
    """A planted instance with about `size` vertices: stars of three plus extras."""
    nd = max(1, size // 3)
    g, _ = generators.gen_planted(nd, spread=2, extra_p=0.05, seed=seed)
    return g


def run_bench(
    sizes: Sequence[int],
    seed: int,
    repeats: int,
    config: Optional[SolverConfig] = None,
    progress: bool = True,
) -> List[BenchRow]:
    if repeats < 1:
        raise ValueError(f"repeats must be positive, got {repeats}")
    if any(size < 1 for size in sizes):
        raise ValueError(f"sizes must be positive, got {list(sizes)}")
    config = config or SolverConfig()
    rows: List[BenchRow] = []
    jobs = [(size, seed + i) for size in sizes for i in range(repeats)]
    for size, instance_seed in tqdm(jobs, desc="bench", disable=not progress):
        g = bench_instance(size, instance_seed)
        start = time.perf_counter()
        result = solver_driver.solve(g, config)
        elapsed = time.perf_counter() - start
        rows.append(
            BenchRow(
                size=size,
                seed=instance_seed,
                n=g.n,
                m=g.m,
                found=result.solution is not None,
                seconds=elapsed,
            )
        )
    return rows
