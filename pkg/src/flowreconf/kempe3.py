"""Proper 3-edge-colourings of cubic graphs under Kempe changes.

Colourings are unlabelled: a colouring is stored as the per-edge class
sequence that is lexicographically least over the six relabellings, which
is the first-occurrence relabelling.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import CheckFailed, InvalidInput
from .flows import Flow, GroupDomain, group_domain
from .multigraph import OrientedMultigraph
from .reconfig import StateGraph, build

# Z2 x Z2 indices of the three nonzero elements (0,1), (1,0), (1,1)
KLEIN_NONZERO = (1, 2, 3)


def canonical(classes) -> tuple[int, ...]:
    classes = list(classes)
    relabel: dict[int, int] = {}
    for c in classes:
        if c not in relabel:
            relabel[c] = len(relabel)
    return tuple(relabel[c] for c in classes)


@dataclass(frozen=True)
class EdgeColoring3:
    classes: tuple[int, ...]

    @classmethod
    def of(cls, classes) -> "EdgeColoring3":
        return cls(canonical(int(c) for c in classes))

    def is_proper(self, g: OrientedMultigraph) -> bool:
        return all(len({self.classes[e] for e, _ in inc}) == len(inc) for inc in g.incidence)


@dataclass(frozen=True)
class KempeChain:
    colors: tuple[int, int]
    edges: frozenset[int]
    is_cycle: bool


def _require_cubic(g: OrientedMultigraph) -> None:
    if not g.is_cubic():
        raise InvalidInput(f"{g.name or 'graph'} is not cubic")


def enumerate_colorings(g: OrientedMultigraph) -> list[EdgeColoring3]:
    """All unlabelled proper 3-edge-colourings, sorted."""
    _require_cubic(g)
    m = g.m
    col = [-1] * m
    out: list[tuple[int, ...]] = []

    def ok(e: int, c: int) -> bool:
        for v in g.arcs[e]:
            for f, _ in g.incidence[v]:
                if f != e and col[f] == c:
                    return False
        return True

    def rec(e: int, used: int) -> None:
        if e == m:
            out.append(tuple(col))
            return
        # classes beyond the next fresh one give relabelled duplicates
        for c in range(min(used + 1, 3)):
            if ok(e, c):
                col[e] = c
                rec(e + 1, max(used, c + 1))
                col[e] = -1

    rec(0, 0)
    return [EdgeColoring3(c) for c in sorted(out)]


def brute_force_colorings(g: OrientedMultigraph) -> set[tuple[int, ...]]:
    """Reference count over all 3^|E| assignments (small graphs only)."""
    _require_cubic(g)
    grid = np.indices((3,) * g.m).reshape(g.m, -1).T
    ok = np.ones(grid.shape[0], dtype=bool)
    for inc in g.incidence:
        es = [e for e, _ in inc]
        for i in range(len(es)):
            for j in range(i + 1, len(es)):
                ok &= grid[:, es[i]] != grid[:, es[j]]
    return {canonical(row.tolist()) for row in grid[ok]}


def kempe_chains(g: OrientedMultigraph, c: EdgeColoring3) -> list[KempeChain]:
    """Components of every two-class subgraph, ordered by colour pair then lowest edge."""
    out = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        edges = [e for e in range(g.m) if c.classes[e] in (i, j)]
        for comp in _edge_components(g, edges):
            verts = {v for e in comp for v in g.arcs[e]}
            out.append(KempeChain((i, j), frozenset(comp), len(verts) == len(comp)))
    return out


def _edge_components(g: OrientedMultigraph, edges: list[int]) -> list[list[int]]:
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        a, b = (find(v) for v in g.arcs[e])
        parent[a] = b
    comps: dict[int, list[int]] = {}
    for e in edges:
        comps.setdefault(find(g.arcs[e][0]), []).append(e)
    return sorted(comps.values())


def kempe_swap(c: EdgeColoring3, chain: KempeChain) -> EdgeColoring3:
    i, j = chain.colors
    out = list(c.classes)
    for e in chain.edges:
        if out[e] not in (i, j):
            raise InvalidInput("chain does not belong to this colouring")
        out[e] = j if out[e] == i else i
    return EdgeColoring3.of(out)


def kempe_neighbors(g: OrientedMultigraph, c: EdgeColoring3) -> list[EdgeColoring3]:
    res = {kempe_swap(c, ch) for ch in kempe_chains(g, c)}
    res.discard(c)
    return sorted(res, key=lambda x: x.classes)


class KempeGraph(StateGraph):
    def __init__(self, g: OrientedMultigraph, colorings: list[EdgeColoring3], pairs):
        super().__init__(len(colorings), pairs)
        self.graph = g
        self.colorings = colorings
        self._index = {c: i for i, c in enumerate(colorings)}

    def index_of(self, c: EdgeColoring3) -> int:
        return self._index[c]


def build_kempe_graph(g: OrientedMultigraph) -> KempeGraph:
    cols = enumerate_colorings(g)
    idx = {c: i for i, c in enumerate(cols)}
    pairs = [(i, idx[d]) for i, c in enumerate(cols) for d in kempe_neighbors(g, c) if i < idx[d]]
    return KempeGraph(g, cols, np.array(pairs, dtype=np.int64).reshape(-1, 2))


# -- correspondence with Z2 x Z2 flows ----------------------------------------------


def klein() -> GroupDomain:
    return group_domain(2, 2)


def flows_from_coloring(g: OrientedMultigraph, c: EdgeColoring3) -> list[Flow]:
    """The six nowhere-zero Z2 x Z2 flows obtained by naming the classes."""
    _require_cubic(g)
    dom = klein()
    flows = [Flow(dom, tuple(perm[x] for x in c.classes)) for perm in permutations(KLEIN_NONZERO)]
    return sorted(flows, key=lambda f: f.values)


def coloring_of_flow(f: Flow) -> EdgeColoring3:
    if not isinstance(f.domain, GroupDomain) or f.domain.group.moduli != (2, 2):
        raise InvalidInput("coloring_of_flow takes a Z2 x Z2 flow")
    if not f.is_nowhere_zero():
        raise InvalidInput("flow has a zero edge")
    return EdgeColoring3.of(f.values)


def verify_correspondence(g: OrientedMultigraph) -> dict:
    """Check that flow components and Kempe components match under the colouring map."""
    kg = build_kempe_graph(g)
    fg = build(g, klein())
    flow_comp = {}
    for i, f in enumerate(fg.flows):
        c = coloring_of_flow(f)
        if not c.is_proper(g):
            raise CheckFailed("a flow yields an improper colouring")
        flow_comp.setdefault(int(kg.labels[kg.index_of(c)]), set()).add(int(fg.labels[i]))
    for c in kg.colorings:
        comps = {int(fg.labels[fg.index_of(f)]) for f in flows_from_coloring(g, c)}
        if len(comps) != 1:
            raise CheckFailed(f"the six flows of colouring {c.classes} span several components")
    # bijection between component sets
    if any(len(v) != 1 for v in flow_comp.values()):
        raise CheckFailed("a Kempe component meets several flow components")
    images = [next(iter(v)) for v in flow_comp.values()]
    if len(set(images)) != len(images) or len(images) != fg.n_components:
        raise CheckFailed("flow components do not match Kempe components")
    # every flow move projects to a Kempe change or to the same colouring
    for i, j in fg.edges():
        a, b = coloring_of_flow(fg.flow(i)), coloring_of_flow(fg.flow(j))
        if a != b and not kg.has_edge(kg.index_of(a), kg.index_of(b)):
            raise CheckFailed("a flow move is not a Kempe change")
    return {
        "colorings": kg.n,
        "flows": fg.n,
        "kempe_components": kg.n_components,
        "flow_components": fg.n_components,
        "ok": True,
    }
