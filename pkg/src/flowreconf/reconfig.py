"""Reconfiguration graphs of nowhere-zero flows.

Adjacency is generated by sweeping every cycle and every move value over all
flows at once; the definitional pairwise test (support of the difference is a
cycle) is kept as :func:`adjacent_by_definition` for cross-checking.
"""

from __future__ import annotations

from collections import deque
import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import CheckFailed, InvalidInput
from .flows import (
    DEFAULT_ENUM_BUDGET,
    Flow,
    GroupDomain,
    IntegerBand,
    ValueDomain,
    enumerate_flow_array,
    tutte_lift,
)
from .groups import make_group
from .multigraph import OrientedMultigraph, SignedCycle, all_cycles, is_cycle_edge_set


class StateGraph:
    """A finite simple graph on states ``0..n-1`` with component bookkeeping."""

    def __init__(self, n: int, pairs: np.ndarray):
        self.n = int(n)
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        adj = coo_matrix((np.ones(rows.shape[0], dtype=np.int8), (rows, cols)), shape=(self.n, self.n)).tocsr()
        adj.sum_duplicates()
        adj.data[:] = 1
        self.adjacency: csr_matrix = adj
        if self.n:
            self.n_components, self.labels = connected_components(adj, directed=False)
        else:
            self.n_components, self.labels = 0, np.zeros(0, dtype=np.int32)

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.nnz // 2)

    def degrees(self) -> np.ndarray:
        return np.diff(self.adjacency.indptr)

    def neighbors_of(self, i: int) -> list[int]:
        a = self.adjacency
        return [int(j) for j in a.indices[a.indptr[i] : a.indptr[i + 1]]]

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.neighbors_of(i)

    def edges(self) -> list[tuple[int, int]]:
        coo = self.adjacency.tocoo()
        return sorted((int(i), int(j)) for i, j in zip(coo.row, coo.col) if i < j)

    def is_connected(self) -> bool:
        return self.n_components <= 1

    def component_sizes(self) -> list[int]:
        if not self.n:
            return []
        return sorted(np.bincount(self.labels).tolist(), reverse=True)

    def components(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i, c in enumerate(self.labels):
            out.setdefault(int(c), []).append(i)
        return sorted(out.values(), key=lambda c: c[0])

    def min_degree(self) -> int | None:
        return int(self.degrees().min()) if self.n else None

    def is_perfect_matching(self) -> bool:
        return self.n > 0 and bool((self.degrees() == 1).all())

    def diameter(self, component: int | None = None) -> int:
        """Diameter of one component (given by any member vertex), or of the
        whole graph when connected."""
        if component is None:
            if not self.is_connected():
                raise InvalidInput("graph is disconnected; pass a component member")
            members = np.arange(self.n)
        else:
            members = np.flatnonzero(self.labels == self.labels[component])
        if members.size == 0:
            raise InvalidInput("diameter of an empty component")
        sub = self.adjacency[members][:, members]
        dist = shortest_path(sub, directed=False, unweighted=True)
        return int(dist.max())

    def component_diameters(self) -> list[int]:
        return [self.diameter(c[0]) for c in self.components()]

    def shortest_path(self, i: int, j: int) -> list[int] | None:
        prev = {i: -1}
        queue = deque([i])
        while queue:
            v = queue.popleft()
            if v == j:
                path = []
                while v != -1:
                    path.append(v)
                    v = prev[v]
                return path[::-1]
            for w in self.neighbors_of(v):
                if w not in prev:
                    prev[w] = v
                    queue.append(w)
        return None

    def is_bipartite(self) -> bool:
        color = [-1] * self.n
        for s in range(self.n):
            if color[s] >= 0:
                continue
            color[s] = 0
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for w in self.neighbors_of(v):
                    if color[w] < 0:
                        color[w] = 1 - color[v]
                        queue.append(w)
                    elif color[w] == color[v]:
                        return False
        return True

    def is_complete_bipartite(self, p: int, q: int) -> bool:
        if self.n != p + q or not self.is_connected() or not self.is_bipartite():
            return False
        return self.edge_count == p * q and sorted(self.degrees().tolist()) == sorted([q] * p + [p] * q)


class _FlowIndex:
    """Maps value rows back to positions in a canonical flow array."""

    def __init__(self, g: OrientedMultigraph, domain: ValueDomain, arr: np.ndarray):
        self.cot = list(g.spanning_tree.cotree_edges)
        self.offset = domain.key_offset
        base = domain.key_base
        d = len(self.cot)
        self.fast = base ** max(d, 1) < 2**62
        if self.fast:
            self.weights = np.array([base**i for i in range(d)], dtype=np.int64)
            keys = self.keys(arr)
            self.order = np.argsort(keys, kind="stable")
            self.sorted_keys = keys[self.order]
        else:
            self.table = {arr[i, self.cot].tobytes(): i for i in range(arr.shape[0])}

    def keys(self, rows: np.ndarray) -> np.ndarray:
        return (rows[:, self.cot] + self.offset) @ self.weights

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64)
        if self.fast:
            keys = self.keys(rows)
            pos = np.searchsorted(self.sorted_keys, keys)
            pos = np.minimum(pos, max(len(self.sorted_keys) - 1, 0))
            found = self.sorted_keys[pos] == keys if len(self.sorted_keys) else np.zeros(len(keys), bool)
            return np.where(found, self.order[pos], -1)
        return np.array([self.table.get(np.ascontiguousarray(r[self.cot]).tobytes(), -1) for r in rows], dtype=np.int64)


def _cycle_moves(domain: ValueDomain, arr: np.ndarray, cyc: SignedCycle):
    """Yield ``(value, rows, new_sub)`` for every move value along ``cyc``
    that keeps the listed rows nowhere-zero and in range."""
    idx = np.array(cyc.edges, dtype=np.int64)
    signs = np.array([s for _, s in cyc.entries])
    sub = arr[:, idx]
    for a in domain.move_values():
        delta = np.where(signs == 1, a, domain.neg(a))
        new = domain.add(sub, delta[None, :])
        ok = (new != 0).all(axis=1) & domain.in_range(new).all(axis=1)
        rows = np.flatnonzero(ok)
        if rows.size:
            yield int(a), rows, new[rows]


class ReconfigGraph(StateGraph):
    """The graph F(G, A) or F(G, k) on all nowhere-zero flows."""

    def __init__(self, g: OrientedMultigraph, domain: ValueDomain, values: np.ndarray, pairs: np.ndarray):
        super().__init__(values.shape[0], pairs)
        self.graph = g
        self.domain = domain
        self.values = values

    def flow(self, i: int) -> Flow:
        return Flow(self.domain, tuple(int(x) for x in self.values[i]))

    @property
    def flows(self) -> list[Flow]:
        return [self.flow(i) for i in range(self.n)]

    def index_of(self, f: Flow) -> int:
        rows = np.asarray([f.values], dtype=np.int64)
        hit = np.flatnonzero((self.values == rows).all(axis=1))
        if not hit.size:
            raise InvalidInput("flow is not a vertex of this reconfiguration graph")
        return int(hit[0])

    def report(self, diameter: bool = False) -> dict:
        rec = {
            "domain": self.domain.notation(),
            "flow_count": self.n,
            "component_count": int(self.n_components),
            "component_sizes": self.component_sizes(),
            "min_degree": self.min_degree(),
            "is_perfect_matching": self.is_perfect_matching(),
            "connected": self.is_connected(),
        }
        if diameter:
            rec["diameter"] = self.component_diameters()
        return rec


def build(
    g: OrientedMultigraph,
    domain: ValueDomain,
    budget: int = DEFAULT_ENUM_BUDGET,
    values: np.ndarray | None = None,
) -> ReconfigGraph:
    arr = enumerate_flow_array(g, domain, budget=budget) if values is None else values
    if arr.shape[0] == 0:
        return ReconfigGraph(g, domain, arr, np.zeros((0, 2), dtype=np.int64))
    index = _FlowIndex(g, domain, arr)
    pairs = []
    for cyc in all_cycles(g):
        for _, rows, new_sub in _cycle_moves(domain, arr, cyc):
            new = arr[rows].copy()
            new[:, list(cyc.edges)] = new_sub
            j = index.lookup(new)
            if (j < 0).any():
                raise CheckFailed("a cycle move produced a flow missing from the enumeration")
            keep = rows < j
            if keep.any():
                pairs.append(np.stack([rows[keep], j[keep]], axis=1))
    pairs = np.concatenate(pairs) if pairs else np.zeros((0, 2), dtype=np.int64)
    return ReconfigGraph(g, domain, arr, pairs)


def neighbors(g: OrientedMultigraph, f: Flow) -> list[Flow]:
    """All nowhere-zero flows one cycle move away from ``f``."""
    arr = f.array()[None, :]
    out = []
    for cyc in all_cycles(g):
        for _, _, new_sub in _cycle_moves(f.domain, arr, cyc):
            vals = f.array()
            vals[list(cyc.edges)] = new_sub[0]
            out.append(Flow(f.domain, tuple(int(x) for x in vals)))
    return sorted(set(out), key=lambda h: h.values)


def neighbor_moves(g: OrientedMultigraph, f: Flow) -> list[tuple[SignedCycle, int]]:
    """The ``(cycle, value)`` moves behind :func:`neighbors`."""
    arr = f.array()[None, :]
    return [(cyc, a) for cyc in all_cycles(g) for a, _, _ in _cycle_moves(f.domain, arr, cyc)]


def adjacent_by_definition(g: OrientedMultigraph, f1: Flow, f2: Flow) -> bool:
    diff = [e for e in range(g.m) if f1.values[e] != f2.values[e]]
    return is_cycle_edge_set(g, diff)


def is_connected(r: StateGraph) -> bool:
    return r.is_connected()


def component_sizes(r: StateGraph) -> list[int]:
    return r.component_sizes()


def min_degree(r: StateGraph) -> int | None:
    return r.min_degree()


def diameter(r: StateGraph, component: int | None = None) -> int:
    return r.diameter(component)


def is_perfect_matching(r: StateGraph) -> bool:
    return r.is_perfect_matching()


def projection_functor_check(g: OrientedMultigraph, k: int, budget: int = DEFAULT_ENUM_BUDGET) -> dict:
    """Check that reducing mod k maps F(G,k) onto F(G,Z_k) edge-to-edge-or-vertex.

    Raises :class:`CheckFailed` on any counterexample.
    """
    fk = build(g, IntegerBand(k), budget=budget)
    zk = GroupDomain(make_group([k]))
    fz = build(g, zk, budget=budget)
    zindex = _FlowIndex(g, zk, fz.values) if fz.n else None
    proj = np.mod(fk.values, k)
    image = zindex.lookup(proj) if fk.n else np.zeros(0, dtype=np.int64)
    if (image < 0).any():
        raise CheckFailed("a projected k-flow is not a nowhere-zero Z_k flow")
    collapsed = 0
    for i, j in fk.edges():
        a, b = int(image[i]), int(image[j])
        if a == b:
            collapsed += 1
            continue
        if not fz.has_edge(a, b):
            raise CheckFailed(f"edge ({i},{j}) of F(G,{k}) does not project to an edge")
        int_supp = set(np.flatnonzero(fk.values[i] != fk.values[j]).tolist())
        mod_supp = set(np.flatnonzero(proj[i] != proj[j]).tolist())
        if int_supp != mod_supp:
            raise CheckFailed(f"edge ({i},{j}) changes its difference support under projection")
    # surjectivity through the Tutte lift
    covered = set(image.tolist())
    for z in range(fz.n):
        if z not in covered:
            lifted = tutte_lift(g, fz.flow(z))
            raise CheckFailed(f"Z_{k} flow {z} has no preimage although it lifts to {lifted.values}")
    if fk.is_connected() and not fz.is_connected():
        raise CheckFailed(f"F(G,{k}) connected but F(G,Z_{k}) is not")
    return {
        "k": k,
        "integer_flows": fk.n,
        "group_flows": fz.n,
        "collapsed_edges": collapsed,
        "integer_connected": fk.is_connected(),
        "group_connected": fz.is_connected(),
    }


def pairwise_adjacency(g: OrientedMultigraph, arr: np.ndarray) -> set[tuple[int, int]]:
    """Adjacency by the definition, quadratic in the number of flows."""
    out = set()
    for i in range(arr.shape[0]):
        diff = arr[i + 1 :] != arr[i]
        for off, row in enumerate(diff):
            if is_cycle_edge_set(g, np.flatnonzero(row).tolist()):
                out.add((i, i + 1 + off))
    return out
