import itertools

import pytest

from packlab.graph import Graph, triangular_graph

ACCEPTANCE_LINES: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


def grassmann_lines_pg32() -> Graph:
    """2-subspaces of GF(2)^4, adjacent when they share exactly one nonzero vector."""
    vecs = range(1, 16)
    planes = set()
    for a, b in itertools.combinations(vecs, 2):
        planes.add(frozenset({a, b, a ^ b}))
    planes = sorted(planes, key=sorted)
    edges = [(i, j) for i, j in itertools.combinations(range(len(planes)), 2)
             if len(planes[i] & planes[j]) == 1]
    return Graph.from_edges(len(planes), edges)


def symplectic_w3_complement() -> Graph:
    """Points of PG(3,3), adjacent when not symplectically orthogonal."""
    pts = []
    for v in itertools.product(range(3), repeat=4):
        if any(v):
            lead = next(x for x in v if x)
            if lead == 1:
                pts.append(v)
    edges = []
    for i, j in itertools.combinations(range(len(pts)), 2):
        x, y = pts[i], pts[j]
        form = (x[0] * y[1] - x[1] * y[0] + x[2] * y[3] - x[3] * y[2]) % 3
        if form:
            edges.append((i, j))
    return Graph.from_edges(len(pts), edges)


@pytest.fixture(scope="session")
def srg_data_dir(tmp_path_factory):
    """Adjacency files for the three rows that need external graphs."""
    from packlab.catalog import srg_filename
    root = tmp_path_factory.mktemp("srg")
    for g in (triangular_graph(9), grassmann_lines_pg32(), symplectic_w3_complement()):
        (root / srg_filename(g.srg_parameters())).write_text(g.to_text())
    return str(root)
