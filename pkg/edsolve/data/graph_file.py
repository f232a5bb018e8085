"""
Plain-text graph and solution files.

Graph file: optional '#' comment lines, a header line "n m", then exactly m lines
"u v" with 0-based ids. Solution file: one line of space-separated ids.
"""

import collections
from typing import Iterable, List, Sequence

from edsolve.errors import EdsError
from edsolve.graph import graph_core
from edsolve.graph.graph_core import BipartiteGraph
from edsolve.solver.eds_core import EdsSolution


class GraphFileError(EdsError, ValueError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


def _ints(line_no: int, text: str, count: int) -> List[int]:
    fields = text.split()
    if len(fields) != count:
        raise GraphFileError(line_no, f"expected {count} integers, got {text!r}")
    try:
        values = [int(f) for f in fields]
    except ValueError:
        raise GraphFileError(line_no, f"expected integers, got {text!r}")
    if any(v < 0 for v in values):
        raise GraphFileError(line_no, f"negative value in {text!r}")
    return values


def parse_graph(text: str) -> BipartiteGraph:
    """
    Parses the graph file format. Raises GraphFileError on malformed text and the
    graph_core errors (NotBipartite, SelfLoop, VertexOutOfRange) on bad edges.
    """
    data = [
        (i, line)
        for i, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not data:
        raise GraphFileError(0, "missing 'n m' header")
    header_no, header = data[0]
    n, m = _ints(header_no, header, 2)
    body = data[1:]
    if len(body) != m:
        last = body[-1][0] if body else header_no
        raise GraphFileError(last, f"header announces {m} edges, found {len(body)}")
    edges = [tuple(_ints(line_no, line, 2)) for line_no, line in body]
    return graph_core.from_edge_list(n, edges)  # type: ignore[arg-type]


def format_graph(g: BipartiteGraph, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    edges = g.edges()
    lines.append(f"{g.n} {len(edges)}")
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


def read_graph_file(path: str) -> BipartiteGraph:
    with open(path, "r", encoding="utf-8") as f:
        return parse_graph(f.read())


def write_graph_file(
    path: str, g: BipartiteGraph, comments: Sequence[str] = ()
) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_graph(g, comments))


def parse_vertex_set(text: str) -> List[int]:
    try:
        values = [int(f) for f in text.split()]
    except ValueError:
        raise GraphFileError(1, f"expected vertex ids, got {text!r}")
    if any(v < 0 for v in values):
        raise GraphFileError(1, f"negative vertex id in {text!r}")
    repeated = sorted(v for v, k in collections.Counter(values).items() if k > 1)
    if repeated:
        raise GraphFileError(1, f"repeated vertex ids {repeated} in {text!r}")
    return values


def read_solution_file(path: str) -> EdsSolution:
    with open(path, "r", encoding="utf-8") as f:
        return EdsSolution.of(parse_vertex_set(f.read()))


def write_solution_file(path: str, solution: Iterable[int]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(EdsSolution.of(solution).to_line() + "\n")
