"""Loopless oriented multigraphs and their cycle structure.

Edges are identified by their index in ``arcs``; the tail/head pair of each
arc is the reference orientation shared by every flow on the graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, InvalidInput, PreconditionError

DEFAULT_CYCLE_DIM_CAP = 24


@dataclass(frozen=True)
class OrientedMultigraph:
    vertex_count: int
    arcs: tuple[tuple[int, int], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        arcs = tuple((int(t), int(h)) for t, h in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        if self.vertex_count < 1:
            raise InvalidInput("a graph needs at least one vertex")
        for i, (t, h) in enumerate(arcs):
            if not (0 <= t < self.vertex_count and 0 <= h < self.vertex_count):
                raise InvalidInput(f"arc {i} = {(t, h)} references a missing vertex")
            if t == h:
                raise InvalidInput(f"arc {i} is a loop at vertex {t}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], name: str = "") -> "OrientedMultigraph":
        return cls(n, tuple(tuple(e) for e in edges), name)

    @property
    def n(self) -> int:
        return self.vertex_count

    @property
    def m(self) -> int:
        return len(self.arcs)

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<OrientedMultigraph{label} n={self.n} m={self.m}>"

    @cached_property
    def incidence(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex, the incident ``(edge, sign)`` pairs; sign is +1 at the tail."""
        inc: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for e, (t, h) in enumerate(self.arcs):
            inc[t].append((e, 1))
            inc[h].append((e, -1))
        return tuple(tuple(x) for x in inc)

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(x) for x in self.incidence)

    def other_end(self, e: int, v: int) -> int:
        t, h = self.arcs[e]
        return h if v == t else t

    def is_cubic(self) -> bool:
        return all(d == 3 for d in self.degrees)

    def has_parallel_edges(self) -> bool:
        seen = set()
        for t, h in self.arcs:
            key = (min(t, h), max(t, h))
            if key in seen:
                return True
            seen.add(key)
        return False

    def components(self, edges: Iterable[int] | None = None) -> list[list[int]]:
        """Vertex components of the spanning subgraph on ``edges`` (default: all)."""
        allowed = None if edges is None else set(edges)
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp, queue = [s], deque([s])
            while queue:
                v = queue.popleft()
                for e, _ in self.incidence[v]:
                    if allowed is not None and e not in allowed:
                        continue
                    w = self.other_end(e, v)
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    @cached_property
    def spanning_tree(self) -> "SpanningTree":
        if not self.is_connected():
            raise PreconditionError("spanning tree requested for a disconnected graph")
        parent_edge = [-1] * self.n
        order = [0]
        seen = [False] * self.n
        seen[0] = True
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for e, _ in self.incidence[v]:
                w = self.other_end(e, v)
                if not seen[w]:
                    seen[w] = True
                    parent_edge[w] = e
                    order.append(w)
                    queue.append(w)
        tree = tuple(sorted(e for e in parent_edge if e >= 0))
        tree_set = set(tree)
        cotree = tuple(e for e in range(self.m) if e not in tree_set)
        return SpanningTree(tuple(parent_edge), tuple(order), tree, cotree)

    @property
    def cycle_space_dim(self) -> int:
        return self.m - self.n + len(self.components())


@dataclass(frozen=True)
class SpanningTree:
    parent_edge: tuple[int, ...]  # -1 at the root
    bfs_order: tuple[int, ...]
    tree_edges: tuple[int, ...]
    cotree_edges: tuple[int, ...]


@dataclass(frozen=True)
class SignedCycle:
    """A cycle as an ordered closed walk of ``(edge, sign)`` entries.

    ``sign`` is +1 when the walk crosses the edge from tail to head.
    """

    entries: tuple[tuple[int, int], ...]

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.entries)

    @property
    def edge_set(self) -> frozenset[int]:
        return frozenset(self.edges)

    def __len__(self) -> int:
        return len(self.entries)

    def sign_of(self, e: int) -> int:
        for f, s in self.entries:
            if f == e:
                return s
        return 0

    def vector(self, m: int) -> np.ndarray:
        v = np.zeros(m, dtype=np.int64)
        for e, s in self.entries:
            v[e] = s
        return v

    def reversed(self) -> "SignedCycle":
        return SignedCycle(tuple((e, -s) for e, s in reversed(self.entries)))

    def to_json(self) -> list[list[int]]:
        return [[e, s] for e, s in self.entries]

    @classmethod
    def from_json(cls, data) -> "SignedCycle":
        return cls(tuple((int(e), int(s)) for e, s in data))


@dataclass(frozen=True)
class CycleBasis:
    tree_edges: tuple[int, ...]
    fundamental: dict  # cotree edge -> SignedCycle, cotree edge has sign +1

    def __len__(self) -> int:
        return len(self.fundamental)


def validate(g: OrientedMultigraph) -> dict:
    """Structural report; loops are already rejected at construction."""
    for i, (t, h) in enumerate(g.arcs):
        if t == h:
            raise InvalidInput(f"arc {i} is a loop")
    return {
        "vertices": g.n,
        "edges": g.m,
        "connected": g.is_connected(),
        "cycle_space_dim": g.cycle_space_dim,
    }


def is_cycle_edge_set(g: OrientedMultigraph, edges: Iterable[int]) -> bool:
    """True iff ``edges`` induce a connected 2-regular subgraph."""
    edges = set(edges)
    if not edges:
        return False
    deg: dict[int, int] = {}
    for e in edges:
        for v in g.arcs[e]:
            deg[v] = deg.get(v, 0) + 1
    if any(d != 2 for d in deg.values()):
        return False
    # untouched vertices are isolated, so a component is touched iff its first vertex is
    return sum(1 for c in g.components(edges) if c[0] in deg) == 1


def cycle_from_edges(g: OrientedMultigraph, edges: Iterable[int]) -> SignedCycle:
    """Canonically directed cycle on a connected 2-regular edge set.

    The walk starts at the lowest edge id and crosses it from tail to head.
    """
    edges = set(edges)
    if not is_cycle_edge_set(g, edges):
        raise InvalidInput(f"edge set {sorted(edges)} is not a cycle")
    start = min(edges)
    entries = [(start, 1)]
    v = g.arcs[start][1]
    prev = start
    while True:
        e = next(f for f, _ in g.incidence[v] if f in edges and f != prev)
        if e == start:
            break
        t, h = g.arcs[e]
        if t == v:
            entries.append((e, 1))
            v = h
        else:
            entries.append((e, -1))
            v = t
        prev = e
    return SignedCycle(tuple(entries))


def cycle_basis(g: OrientedMultigraph) -> CycleBasis:
    tree = g.spanning_tree
    fundamental = {}
    for c in tree.cotree_edges:
        path = tree_path_edges(g, *g.arcs[c])
        cyc = cycle_from_edges(g, set(path) | {c})
        if cyc.sign_of(c) != 1:
            cyc = cyc.reversed()
        fundamental[c] = cyc
    return CycleBasis(tree.tree_edges, fundamental)


def tree_path_edges(g: OrientedMultigraph, u: int, v: int) -> list[int]:
    """Edges of the spanning-tree path between ``u`` and ``v``."""
    pe = g.spanning_tree.parent_edge

    def up(x):
        chain = [x]
        while pe[x] >= 0:
            x = g.other_end(pe[x], x)
            chain.append(x)
        return chain

    a, b = up(u), up(v)
    common = set(a) & set(b)
    out = []
    for chain in (a, b):
        for x in chain:
            if x in common:
                break
            out.append(pe[x])
    return out


def _edge_masks(g: OrientedMultigraph) -> list[int]:
    basis = cycle_basis(g)
    return [sum(1 << e for e in cyc.edges) for cyc in basis.fundamental.values()]


@lru_cache(maxsize=256)
def _all_cycles_cached(g: OrientedMultigraph, cap: int) -> tuple[SignedCycle, ...]:
    if not g.is_connected():
        raise PreconditionError("all_cycles needs a connected graph")
    masks = _edge_masks(g)
    d = len(masks)
    if d > cap:
        raise BudgetExceeded(f"cycle space dimension {d} exceeds cap {cap}")
    if g.m > 64:
        members = [0]
        for b in masks:
            members += [x ^ b for x in members]
        candidates = [x for x in members[1:] if _max_degree_mask(g, x) <= 2]
    else:
        members = np.zeros(1, dtype=np.uint64)
        for b in masks:
            members = np.concatenate([members, members ^ np.uint64(b)])
        members = members[1:]
        ok = np.ones(members.shape, dtype=bool)
        for v in range(g.n):
            inc = np.uint64(sum(1 << e for e, _ in g.incidence[v]))
            ok &= np.bitwise_count(members & inc) <= 2
        candidates = [int(x) for x in members[ok]]
    out = []
    for x in candidates:
        edges = [e for e in range(g.m) if x >> e & 1]
        if is_cycle_edge_set(g, edges):
            out.append(cycle_from_edges(g, edges))
    out.sort(key=lambda c: sorted(c.edges))
    return tuple(out)


def _max_degree_mask(g: OrientedMultigraph, x: int) -> int:
    return max(sum(1 for e, _ in g.incidence[v] if x >> e & 1) for v in range(g.n))


def all_cycles(g: OrientedMultigraph, cap: int = DEFAULT_CYCLE_DIM_CAP) -> list[SignedCycle]:
    """Every cycle of ``g``, canonically directed, sorted by sorted edge list."""
    return list(_all_cycles_cached(g, cap))


def shortest_cycle_through_edge(g: OrientedMultigraph, e: int) -> int | None:
    t, h = g.arcs[e]
    dist = {t: 0}
    queue = deque([t])
    while queue:
        v = queue.popleft()
        if v == h:
            return dist[v] + 1
        for f, _ in g.incidence[v]:
            if f == e:
                continue
            w = g.other_end(f, v)
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return None


def shortest_cycle_containing(g: OrientedMultigraph, e: int, allowed: Iterable[int] | None = None) -> SignedCycle | None:
    """A shortest cycle through ``e`` using only ``allowed`` edges (plus ``e``)."""
    allowed = set(range(g.m)) if allowed is None else set(allowed)
    t, h = g.arcs[e]
    via: dict[int, int] = {t: -1}
    queue = deque([t])
    while queue and h not in via:
        v = queue.popleft()
        for f, _ in g.incidence[v]:
            if f == e or f not in allowed:
                continue
            w = g.other_end(f, v)
            if w not in via:
                via[w] = f
                queue.append(w)
    if h not in via:
        return None
    edges = {e}
    v = h
    while via[v] >= 0:
        edges.add(via[v])
        v = g.other_end(via[v], v)
    return cycle_from_edges(g, edges)


def find_cycle(g: OrientedMultigraph, allowed: Iterable[int]) -> SignedCycle | None:
    """Some cycle inside the edge set ``allowed``, or None if it is a forest."""
    allowed = sorted(set(allowed))
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in allowed:
        t, h = g.arcs[e]
        rt, rh = find(t), find(h)
        if rt == rh:
            earlier = [f for f in allowed if f < e]
            return shortest_cycle_containing(g, e, earlier)
        parent[rt] = rh
    return None


def _max_flow_unit(g: OrientedMultigraph, s: int, t: int, limit: int) -> int:
    """Number of edge-disjoint s-t paths, capped at ``limit``."""
    x = [0] * g.m  # +1: one unit tail->head, -1: head->tail
    flow = 0
    while flow < limit:
        via: dict[int, tuple[int, int]] = {s: (-1, 0)}
        queue = deque([s])
        while queue and t not in via:
            v = queue.popleft()
            for e, sign in g.incidence[v]:
                # sign +1: v is tail, pushing along the arc raises x[e]
                if (sign == 1 and x[e] < 1) or (sign == -1 and x[e] > -1):
                    w = g.other_end(e, v)
                    if w not in via:
                        via[w] = (e, sign)
                        queue.append(w)
        if t not in via:
            break
        v = t
        while v != s:
            e, sign = via[v]
            x[e] += sign
            v = g.other_end(e, v)
        flow += 1
    return flow


def edge_connectivity(g: OrientedMultigraph, limit: int | None = None) -> int:
    if g.n == 1:
        return limit if limit is not None else 0
    if not g.is_connected():
        return 0
    limit = g.m if limit is None else limit
    best = limit
    for t in range(1, g.n):
        best = min(best, _max_flow_unit(g, 0, t, best))
        if best == 0:
            break
    return best


def is_k_edge_connected(g: OrientedMultigraph, k: int) -> bool:
    if k < 1:
        raise InvalidInput("k must be at least 1")
    if not g.is_connected():
        return False
    if g.n == 1:
        return True
    return edge_connectivity(g, limit=k) >= k


def suppress_degree_2(g: OrientedMultigraph) -> tuple[OrientedMultigraph, list[tuple[tuple[int, int], ...]]]:
    """Replace maximal paths through degree-2 vertices by single edges.

    Returns the reduced graph and, for each of its edges, the ``(old edge,
    sign)`` path it stands for, listed from its tail to its head.  A degree-2
    vertex whose two edges lead to the same neighbour is kept, since
    suppressing it would create a loop; so a cycle reduces to a digon.
    """
    if not g.is_connected():
        raise PreconditionError("suppress_degree_2 needs a connected graph")
    for v, d in enumerate(g.degrees):
        if d < 2:
            raise PreconditionError(f"vertex {v} has degree {d} < 2")
    # current edges: id -> [tail, head, path]
    edges = {e: [t, h, [(e, 1)]] for e, (t, h) in enumerate(g.arcs)}
    inc: dict[int, set[int]] = {v: {e for e, _ in g.incidence[v]} for v in range(g.n)}
    next_id = g.m
    changed = True
    while changed:
        changed = False
        for v in sorted(inc):
            if len(inc[v]) != 2:
                continue
            e1, e2 = sorted(inc[v])
            t1, h1, p1 = edges[e1]
            t2, h2, p2 = edges[e2]
            u = t1 if h1 == v else h1
            w = t2 if h2 == v else h2
            if u == v or w == v or u == w:
                continue
            # path u -> v along e1, then v -> w along e2
            left = p1 if h1 == v else [(x, -s) for x, s in reversed(p1)]
            right = p2 if t2 == v else [(x, -s) for x, s in reversed(p2)]
            del edges[e1], edges[e2]
            edges[next_id] = [u, w, left + right]
            inc[u].discard(e1)
            inc[u].add(next_id)
            inc[w].discard(e2)
            inc[w].add(next_id)
            del inc[v]
            next_id += 1
            changed = True
            break
    keep = sorted(inc)
    relabel = {v: i for i, v in enumerate(keep)}
    ordered = sorted(edges.values(), key=lambda rec: min(x for x, _ in rec[2]))
    arcs = tuple((relabel[t], relabel[h]) for t, h, _ in ordered)
    corr = [tuple(p) for _, _, p in ordered]
    return OrientedMultigraph(len(keep), arcs, g.name + "/suppressed" if g.name else ""), corr
