"""
Command-line front end.

    edsolve solve graph.txt [--strict | --permissive] [--trace trace.json]
    edsolve oracle graph.txt [--heuristic mrv]
    edsolve verify graph.txt --set "0 3"
    edsolve detect graph.txt --pattern s115|p8|c6
    edsolve gen --out planted.txt --kind planted --nd 4 --spread 2 --seed 1
    edsolve compare --count 100 --seed 0 --max-n 16
    edsolve bench --sizes 12 24 48 --repeats 3

Results go to stdout, logs and error messages to stderr. Exit codes: 0 and 1 carry
the answer, 2 is bad input, 3 a non-bipartite graph and 4 a strict-mode refusal of
an input with an induced S(1,1,5).
"""

import abc
import dataclasses
import logging
import sys
from typing import List, Optional, Sequence, Union

import simple_parsing

from edsolve.data import generators
from edsolve.data import graph_file
from edsolve.errors import EdsError
from edsolve.graph import graph_core
from edsolve.graph import pattern_detect
from edsolve.solver import eds_core
from edsolve.solver import oracle
from edsolve.solver import solver_driver
from edsolve.solver.eds_core import EdsSolution
from edsolve.solver import solver_config
from edsolve.solver.solver_config import SolverConfig
from edsolve.solver.solver_config import fix_hyphens
from edsolve.tools import harness

EXIT_FOUND = 0
EXIT_NOT_FOUND = 1
EXIT_BAD_INPUT = 2
EXIT_NOT_BIPARTITE = 3
EXIT_NOT_S115_FREE = 4

PATTERNS = ("s115", "p8", "c6")


def _print_solution(solution: Optional[EdsSolution]) -> int:
    if solution is None:
        print("NONE")
        return EXIT_NOT_FOUND
    print(f"EDS {len(solution)}")
    print(solution.to_line())
    return EXIT_FOUND


class EdsCommand(abc.ABC):
    verbose: bool

    @abc.abstractmethod
    def run(self) -> int:
        raise NotImplementedError


@dataclasses.dataclass
class SolveCommand(EdsCommand):
    graph: str = simple_parsing.field(positional=True)
    """Graph file."""
    solver: SolverConfig = simple_parsing.field(default_factory=SolverConfig)
    config_file: str = "default_config.yaml"
    """Solver settings, by name in edsolve/solver/configs or by path; flags win."""
    permissive: bool = False
    """Solve inputs with an induced S(1,1,5) even when the settings say strict."""
    trace: Optional[str] = None
    """Write the solve trace to this file as JSON."""
    verbose: bool = False

    def __post_init__(self):
        if self.solver.strict and self.permissive:
            raise ValueError("--strict and --permissive are mutually exclusive")

    def run(self) -> int:
        g = graph_file.read_graph_file(self.graph)
        config = solver_config.merge_solver_config(self.solver, self.config_file)
        if self.permissive:
            config = dataclasses.replace(config, strict=False)
        result = solver_driver.solve(g, config)
        if self.trace:
            with open(self.trace, "w", encoding="utf-8") as f:
                f.write(result.trace.to_json(indent=2) + "\n")
        return _print_solution(result.solution)


@dataclasses.dataclass
class OracleCommand(EdsCommand):
    graph: str = simple_parsing.field(positional=True)
    """Graph file."""
    heuristic: str = simple_parsing.choice(*oracle.HEURISTICS, default="lowest")
    size_cap: int = oracle.DEFAULT_SIZE_CAP
    verbose: bool = False

    def run(self) -> int:
        g = graph_file.read_graph_file(self.graph)
        result = oracle.oracle_solve(
            g, heuristic=self.heuristic, size_cap=self.size_cap
        )
        logging.info(f"oracle explored {result.explored_nodes} nodes")
        return _print_solution(result.solution)


@dataclasses.dataclass
class VerifyCommand(EdsCommand):
    graph: str = simple_parsing.field(positional=True)
    """Graph file."""
    vertex_set: str = simple_parsing.field(default="", alias="--set")
    """Space-separated candidate vertex ids."""
    verbose: bool = False

    def run(self) -> int:
        g = graph_file.read_graph_file(self.graph)
        candidate = graph_file.parse_vertex_set(self.vertex_set)
        report = eds_core.verify(g, candidate)
        if report.valid:
            print("VALID")
            return EXIT_FOUND
        assert report.violation is not None
        v, count = report.violation
        print(f"INVALID v={v} count={count}")
        return EXIT_NOT_FOUND


@dataclasses.dataclass
class DetectCommand(EdsCommand):
    graph: str = simple_parsing.field(positional=True)
    """Graph file."""
    pattern: str = simple_parsing.choice(*PATTERNS, default="s115")
    verbose: bool = False

    def run(self) -> int:
        g = graph_file.read_graph_file(self.graph)
        witness: Optional[pattern_detect.InducedWitness]
        if self.pattern == "s115":
            witness = pattern_detect.find_s115(g)
        elif self.pattern == "p8":
            _, witness = pattern_detect.is_p8_free(g)
        else:
            witness = next(pattern_detect.iter_induced_c6(g), None)
        if witness is None:
            print("FREE")
            return EXIT_FOUND
        print(" ".join(str(v) for v in witness.vertices))
        return EXIT_NOT_FOUND


@dataclasses.dataclass
class GenCommand(EdsCommand):
    out: str = simple_parsing.field(alias="-o")
    """Graph file to write. The planted kind also writes <out>.solution."""
    spec: generators.GenSpec = simple_parsing.field(
        default_factory=generators.GenSpec
    )
    verbose: bool = False

    def run(self) -> int:
        g, planted = generators.generate(self.spec)
        settings = dataclasses.asdict(self.spec)
        comment = "generated " + " ".join(f"{k}={v}" for k, v in settings.items())
        graph_file.write_graph_file(self.out, g, comments=[comment])
        print(f"wrote {self.out} n={g.n} m={g.m}")
        if planted is not None:
            solution_path = self.out + ".solution"
            graph_file.write_solution_file(solution_path, planted)
            print(f"wrote {solution_path} size={len(planted)}")
        return EXIT_FOUND


@dataclasses.dataclass
class CompareCommand(EdsCommand):
    count: int = 100
    """Number of S(1,1,5)-free instances."""
    seed: int = 0
    max_n: int = 16
    """Largest instance size."""
    solver: SolverConfig = simple_parsing.field(default_factory=SolverConfig)
    config_file: str = "default_config.yaml"
    """Solver settings, by name in edsolve/solver/configs or by path; flags win."""
    reports: Optional[str] = None
    """Write one JSON line per instance to this file."""
    no_progress: bool = False
    verbose: bool = False

    def run(self) -> int:
        summary, reports = harness.run_compare(
            self.count,
            self.seed,
            self.max_n,
            config=solver_config.merge_solver_config(self.solver, self.config_file),
            progress=not self.no_progress,
        )
        if self.reports:
            with open(self.reports, "w", encoding="utf-8") as f:
                for report in reports:
                    f.write(report.to_json() + "\n")
        for line in summary.lines():
            print(line)
        return EXIT_FOUND if summary.ok else EXIT_NOT_FOUND


@dataclasses.dataclass
class BenchCommand(EdsCommand):
    sizes: List[int] = dataclasses.field(default_factory=lambda: [12, 24, 48])
    """Approximate vertex counts of the planted instances."""
    seed: int = 0
    repeats: int = 3
    solver: SolverConfig = simple_parsing.field(default_factory=SolverConfig)
    config_file: str = "default_config.yaml"
    """Solver settings, by name in edsolve/solver/configs or by path; flags win."""
    no_progress: bool = False
    verbose: bool = False

    def run(self) -> int:
        rows = harness.run_bench(
            self.sizes,
            self.seed,
            self.repeats,
            config=solver_config.merge_solver_config(self.solver, self.config_file),
            progress=not self.no_progress,
        )
        print("\t".join(harness.BENCH_HEADER))
        for row in rows:
            print(row.to_tsv())
        return EXIT_FOUND


EDS_TOOL_COMMANDS = {
    "solve": SolveCommand,
    "oracle": OracleCommand,
    "verify": VerifyCommand,
    "detect": DetectCommand,
    "gen": GenCommand,
    "compare": CompareCommand,
    "bench": BenchCommand,
}


@dataclasses.dataclass
class EdsToolArgs:
    command: Union[
        SolveCommand,
        OracleCommand,
        VerifyCommand,
        DetectCommand,
        GenCommand,
        CompareCommand,
        BenchCommand,
    ] = simple_parsing.subparsers(EDS_TOOL_COMMANDS)


def _error(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = simple_parsing.parse(
            config_class=EdsToolArgs, args=[fix_hyphens(arg) for arg in argv]
        )
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_BAD_INPUT
    except ValueError as e:
        _error(str(e))
        return EXIT_BAD_INPUT

    command = args.command
    logging.basicConfig(level=logging.DEBUG if command.verbose else logging.INFO)
    try:
        return command.run()
    except solver_driver.NotS115Free as e:
        _error(str(e))
        return EXIT_NOT_S115_FREE
    except graph_core.NotBipartite as e:
        _error(str(e))
        return EXIT_NOT_BIPARTITE
    except (EdsError, ValueError, OSError) as e:
        _error(str(e))
        return EXIT_BAD_INPUT


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
