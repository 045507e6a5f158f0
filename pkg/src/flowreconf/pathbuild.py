"""Constructive reconfiguration sequences.

Every routine returns explicit cycle moves so a path can be replayed and
checked step by step with :meth:`ReconfigPath.validate`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, PreconditionError
from .flows import Flow, GroupDomain, IntegerBand, add_cycle, verify_flow
from .groups import GroupSpec
from .multigraph import (
    OrientedMultigraph,
    SignedCycle,
    cycle_from_edges,
    find_cycle,
    is_cycle_edge_set,
    shortest_cycle_containing,
    shortest_cycle_through_edge,
    suppress_degree_2,
)

Move = tuple[SignedCycle, int]


@dataclass
class ReconfigPath:
    flows: list[Flow]
    moves: list[Move] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.moves)

    @property
    def start(self) -> Flow:
        return self.flows[0]

    @property
    def end(self) -> Flow:
        return self.flows[-1]

    def push(self, c: SignedCycle, a: int) -> Flow:
        nxt = add_cycle(self.flows[-1], c, a)
        self.flows.append(nxt)
        self.moves.append((c, int(a)))
        return nxt

    def extend(self, other: "ReconfigPath") -> None:
        if other.flows[0] != self.flows[-1]:
            raise InvalidInput("paths do not meet")
        self.flows.extend(other.flows[1:])
        self.moves.extend(other.moves)

    def reversed(self) -> "ReconfigPath":
        domain = self.flows[0].domain
        moves = [(c, int(domain.neg(np.int64(a)))) for c, a in reversed(self.moves)]
        return ReconfigPath(self.flows[::-1], moves)

    def validate(self, g: OrientedMultigraph) -> bool:
        """Raise unless every step is a genuine move between nowhere-zero flows."""
        if len(self.flows) != len(self.moves) + 1:
            raise InvalidInput("path has mismatched flow and move counts")
        for i, f in enumerate(self.flows):
            verify_flow(g, f)
            if not f.is_nowhere_zero():
                raise InvalidInput(f"flow {i} of the path has a zero edge")
        for i, (c, a) in enumerate(self.moves):
            if not is_cycle_edge_set(g, c.edges):
                raise InvalidInput(f"move {i} is not along a cycle")
            if add_cycle(self.flows[i], c, a) != self.flows[i + 1]:
                raise InvalidInput(f"move {i} does not reproduce the next flow")
            if self.flows[i] == self.flows[i + 1]:
                raise InvalidInput(f"move {i} is the identity")
        return True

    def to_json(self) -> dict:
        domain = self.flows[0].domain
        return {
            "domain": domain.notation(),
            "length": len(self.moves),
            "start": self.flows[0].to_json()["values"],
            "moves": [{"cycle": c.to_json(), "value": domain.value_to_json(a)} for c, a in self.moves],
        }


# -- cycle decomposition ---------------------------------------------------------


def decompose_into_cycle_flows(g: OrientedMultigraph, f: Flow) -> list[Move]:
    """Write ``f`` as a sum of flows supported on cycles, greedily.

    Each step cancels ``f`` on its lowest-id support edge along a shortest
    cycle inside the current support.
    """
    dom = f.domain
    rest = f.array()
    out: list[Move] = []
    while True:
        supp = np.flatnonzero(rest != 0).tolist()
        if not supp:
            return out
        e = supp[0]
        c = shortest_cycle_containing(g, e, supp)
        if c is None:
            raise InvalidInput("support has a bridge edge; the input is not a flow")
        val = rest[e]
        a = int(val if c.sign_of(e) == 1 else dom.neg(val))
        out.append((c, a))
        for x, s in c.entries:
            rest[x] = dom.sub(rest[x], a) if s == 1 else dom.add(rest[x], a)


# -- product groups ----------------------------------------------------------------


def split_factors(domain: GroupDomain, left_rank: int | None = None) -> tuple[GroupSpec, GroupSpec]:
    if not isinstance(domain, GroupDomain) or domain.group.rank < 2:
        raise InvalidInput("product-group routines need a group with at least two cyclic factors")
    return domain.group.split(domain.group.rank // 2 if left_rank is None else left_rank)


def split_flow(f: Flow, left_rank: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Component index arrays ``(a, b)`` of an ``A x B`` flow."""
    _, B = split_factors(f.domain, left_rank)
    v = f.array()
    return v // B.order, v % B.order


def _component_move(A: GroupSpec, B: GroupSpec, which: int, a: int) -> int:
    """Product-group index of ``(a, 0)`` (which=0) or ``(0, a)`` (which=1)."""
    return a * B.order if which == 0 else a


def extend_support(g: OrientedMultigraph, f: Flow, which: int = 1, left_rank: int | None = None) -> tuple[Flow, Move]:
    """One cycle move strictly growing the support of one component of ``f``.

    ``which`` is 0 for the first factor and 1 for the second.
    """
    A, B = split_factors(f.domain, left_rank)
    comps = split_flow(f, left_rank)
    comp = comps[which]
    G = (A, B)[which]
    zeros = np.flatnonzero(comp == 0)
    if not zeros.size:
        raise PreconditionError("that component already has full support")
    e = int(zeros[0])
    c = shortest_cycle_containing(g, e)
    if c is None or len(c) > G.order - 1:
        raise PreconditionError(f"edge {e} lies on no cycle of length at most {G.order - 1}")
    seen = {int(comp[x]) if s == 1 else int(G.neg_idx(comp[x])) for x, s in c.entries if comp[x] != 0}
    pick = next(x for x in range(1, G.order) if x not in seen)
    # subtract pick along c, i.e. add -pick
    a = _component_move(A, B, which, int(G.neg_idx(pick)))
    nxt = add_cycle(f, c, a)
    return nxt, (c, a)


def extend_second_support(g: OrientedMultigraph, f: Flow, left_rank: int | None = None) -> tuple[Flow, Move]:
    return extend_support(g, f, 1, left_rank)


def _lift_component_moves(moves: list[Move], A: GroupSpec, B: GroupSpec, which: int) -> list[Move]:
    return [(c, _component_move(A, B, which, a)) for c, a in moves]


def exchange_path(g: OrientedMultigraph, f1: Flow, f2: Flow, left_rank: int | None = None) -> ReconfigPath:
    """Path ``(a,b) -> (a',b) -> (a',b')``; needs ``b`` and ``a'`` nowhere-zero."""
    A, B = split_factors(f1.domain, left_rank)
    a1, b1 = split_flow(f1, left_rank)
    a2, b2 = split_flow(f2, left_rank)
    if (b1 == 0).any() or (a2 == 0).any():
        raise PreconditionError("exchange needs the second factor of the start and the first factor of the end nowhere-zero")
    path = ReconfigPath([f1])
    da = Flow(GroupDomain(A), tuple(int(x) for x in A.sub_idx(a2, a1)))
    for c, a in _lift_component_moves(decompose_into_cycle_flows(g, da), A, B, 0):
        path.push(c, a)
    db = Flow(GroupDomain(B), tuple(int(x) for x in B.sub_idx(b2, b1)))
    for c, a in _lift_component_moves(decompose_into_cycle_flows(g, db), A, B, 1):
        path.push(c, a)
    if path.end != f2:
        raise AssertionError("exchange path missed its target")
    return path


def short_cycle_bound(g: OrientedMultigraph) -> int | None:
    """Least k such that every edge lies on a cycle of length at most k (None if a bridge exists)."""
    best = 0
    for e in range(g.m):
        L = shortest_cycle_through_edge(g, e)
        if L is None:
            return None
        best = max(best, L)
    return best


def product_path(g: OrientedMultigraph, f1: Flow, f2: Flow, left_rank: int | None = None) -> ReconfigPath:
    """A path of length at most 4|E| between two nowhere-zero ``A x B`` flows."""
    A, B = split_factors(f1.domain, left_rank)
    k = short_cycle_bound(g)
    if k is None:
        raise PreconditionError("graph has a bridge")
    k = max(k, 3)
    if A.order < k + 1 or B.order < k + 1:
        raise PreconditionError(f"factors of order {A.order}, {B.order} need to be at least {k + 1}")
    head = ReconfigPath([f1])
    while (split_flow(head.end, left_rank)[1] == 0).any():
        _, (c, a) = extend_support(g, head.end, 1, left_rank)
        head.push(c, a)
    tail = ReconfigPath([f2])
    while (split_flow(tail.end, left_rank)[0] == 0).any():
        _, (c, a) = extend_support(g, tail.end, 0, left_rank)
        tail.push(c, a)
    head.extend(exchange_path(g, head.end, tail.end, left_rank))
    head.extend(tail.reversed())
    return head


# -- integer flows ---------------------------------------------------------------


def mod_zero_path(g: OrientedMultigraph, f: Flow, f2: Flow) -> ReconfigPath:
    """Path between k-flows congruent mod k, adding k along directed cycles."""
    if not isinstance(f.domain, IntegerBand) or f.domain != f2.domain:
        raise InvalidInput("mod_zero_path needs two flows over the same integer band")
    k = f.domain.k
    d = f2.array() - f.array()
    if (d % k != 0).any():
        raise PreconditionError("flows are not congruent mod k")
    step = (d // k).tolist()  # entries in {-1, 0, 1}
    remaining = {e for e in range(g.m) if step[e]}
    out_arcs: dict[int, list[int]] = {}
    for e in sorted(remaining):
        t, h = g.arcs[e]
        out_arcs.setdefault(t if step[e] == 1 else h, []).append(e)
    path = ReconfigPath([f])
    while remaining:
        e0 = min(remaining)
        v = g.arcs[e0][0] if step[e0] == 1 else g.arcs[e0][1]
        walk: list[tuple[int, int]] = []
        pos = {v: 0}
        while True:
            e = next(x for x in out_arcs[v] if x in remaining and (not walk or x != walk[-1][0]))
            walk.append((e, step[e]))
            t, h = g.arcs[e]
            v = h if step[e] == 1 else t
            if v in pos:
                loop = walk[pos[v] :]
                break
            pos[v] = len(walk)
        for e, _ in loop:
            remaining.discard(e)
        path.push(SignedCycle(tuple(loop)), k)
    return path


# -- escaping a flow -------------------------------------------------------------------


def _best_value(f: Flow, c: SignedCycle, prefer=None) -> int | None:
    """Least move value keeping ``f`` nowhere-zero along ``c``."""
    dom = f.domain
    forbidden = {int(dom.neg(np.int64(f.values[e]))) if s == 1 else f.values[e] for e, s in c.entries}
    if prefer is not None and prefer not in forbidden:
        return prefer
    for a in dom.move_values():
        a = int(a)
        if a in forbidden:
            continue
        if isinstance(dom, IntegerBand):
            vals = [f.values[e] + s * a for e, s in c.entries]
            if any(abs(x) >= dom.k for x in vals):
                continue
        return a
    return None


def escape_cycle(g: OrientedMultigraph, f: Flow) -> Move:
    """A cycle move from ``f`` to a different nowhere-zero flow.

    Supported: integer bands, Z4, Z2 x Z2 and groups of order at least 6.
    """
    if not f.is_nowhere_zero():
        raise PreconditionError("escape_cycle needs a nowhere-zero flow")
    dom = f.domain
    if isinstance(dom, IntegerBand):
        return _escape_integer(g, f)
    order = dom.group.order
    if dom.group.moduli == (4,):
        return _escape_z4(g, f)
    if dom.group.moduli == (2, 2) or order >= 6:
        return _escape_least_class(g, f)
    raise PreconditionError(f"no frozen-flow escape is known for {dom}")


def _escape_integer(g: OrientedMultigraph, f: Flow) -> Move:
    k = f.domain.k
    out: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for e, (t, h) in enumerate(g.arcs):
        out[t if f.values[e] > 0 else h].append(e)
    v = next(v for v in range(g.n) if out[v])
    walk: list[tuple[int, int]] = []
    pos = {v: 0}
    while True:
        e = out[v][0]
        s = 1 if f.values[e] > 0 else -1
        walk.append((e, s))
        t, h = g.arcs[e]
        v = h if s == 1 else t
        if v in pos:
            return SignedCycle(tuple(walk[pos[v] :])), -k
        pos[v] = len(walk)


def _escape_z4(g: OrientedMultigraph, f: Flow) -> Move:
    # the odd-valued edges carry a Z2 flow, so they form an even subgraph
    odd = [e for e in range(g.m) if f.values[e] % 2]
    if odd:
        c = find_cycle(g, odd)
        return c, 2
    c = find_cycle(g, range(g.m))
    if c is None:
        raise PreconditionError("graph has no cycle")
    return c, 1


def _escape_least_class(g: OrientedMultigraph, f: Flow) -> Move:
    grp = f.domain.group
    h, corr = suppress_degree_2(g)
    digon = next((v for v in range(h.n) if h.degree(v) == 2), None)
    if digon is not None:
        hc = [e for e, _ in h.incidence[digon]]
        c = cycle_from_edges(g, {x for e in hc for x, _ in corr[e]})
        a = _best_value(f, c)
        return c, a
    hvals = []
    for path in corr:
        x, s = path[0]
        hvals.append(f.values[x] if s == 1 else int(grp.neg_idx(f.values[x])))
    classes = sorted({min(a, int(grp.neg_idx(a))) for a in range(1, grp.order)})
    counts = {c: 0 for c in classes}
    for v in hvals:
        counts[min(v, int(grp.neg_idx(v)))] += 1
    rare = min(classes, key=lambda c: (counts[c], c))
    keep = [e for e, v in enumerate(hvals) if min(v, int(grp.neg_idx(v))) != rare]
    hc = find_cycle(h, keep)
    if hc is None:
        raise AssertionError("no cycle avoids the least frequent class")
    c = cycle_from_edges(g, {x for e in hc.edges for x, _ in corr[e]})
    a = _best_value(f, c, prefer=rare)
    return c, a


def escape_neighbor(g: OrientedMultigraph, f: Flow) -> Flow:
    c, a = escape_cycle(g, f)
    return add_cycle(f, c, a)


def path_from_flows(g: OrientedMultigraph, seq: list[Flow]) -> ReconfigPath:
    """Recover the cycle moves of a walk given as consecutive adjacent flows."""
    path = ReconfigPath([seq[0]])
    for f, f2 in zip(seq, seq[1:]):
        d = (f2 - f).array()
        supp = np.flatnonzero(d != 0).tolist()
        if not is_cycle_edge_set(g, supp):
            raise InvalidInput("consecutive flows do not differ along a cycle")
        c = cycle_from_edges(g, supp)
        e, s = c.entries[0]
        a = int(d[e] if s == 1 else f.domain.neg(d[e]))
        path.push(c, a)
        if path.end != f2:
            raise InvalidInput("consecutive flows do not differ by a constant along a cycle")
    return path
