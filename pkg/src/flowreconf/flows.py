"""Nowhere-zero flows over finite abelian groups and integer bands.

Values are stored as plain integers: for a group domain a value is the
element's index (see :mod:`flowreconf.groups`), for an integer band it is
the signed integer itself.  In both cases 0 is the zero value, which keeps
the vectorised code domain-agnostic.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import BudgetExceeded, ConservationError, InvalidInput, PreconditionError
from .groups import GroupElem, GroupSpec, make_group, parse_group
from .multigraph import OrientedMultigraph, SignedCycle

DEFAULT_ENUM_BUDGET = 2**26

# trailing cotree coordinates are expanded into one numpy block of at most this size
_BLOCK = 2**17


@dataclass(frozen=True)
class GroupDomain:
    group: GroupSpec

    @property
    def size(self) -> int:
        return self.group.order

    def notation(self) -> str:
        return self.group.notation()

    def __str__(self) -> str:
        return str(self.group)

    def free_values(self) -> np.ndarray:
        return np.arange(1, self.group.order, dtype=np.int64)

    def move_values(self) -> np.ndarray:
        return self.free_values()

    def add(self, x, y):
        return self.group.add_idx(x, y)

    def neg(self, x):
        return self.group.neg_idx(x)

    def sub(self, x, y):
        return self.group.sub_idx(x, y)

    def in_range(self, x):
        return np.ones(np.shape(x), dtype=bool)

    @property
    def key_base(self) -> int:
        return self.group.order

    @property
    def key_offset(self) -> int:
        return 0

    def value_to_json(self, v: int):
        return list(self.group.element(int(v)).residues)

    def value_from_json(self, data) -> int:
        if isinstance(data, int):
            data = [data]
        return self.group.index(self.group.elem(*data))

    def format_value(self, v: int) -> str:
        return str(self.group.element(int(v)))


@dataclass(frozen=True)
class IntegerBand:
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise InvalidInput(f"integer band needs k >= 2, got {self.k}")

    @property
    def size(self) -> int:
        return self.k

    def notation(self) -> str:
        return str(self.k)

    def __str__(self) -> str:
        return f"{self.k}-flows"

    def free_values(self) -> np.ndarray:
        r = np.arange(1, self.k, dtype=np.int64)
        return np.concatenate([-r[::-1], r])

    def move_values(self) -> np.ndarray:
        r = np.arange(1, 2 * self.k - 1, dtype=np.int64)
        return np.concatenate([-r[::-1], r])

    def add(self, x, y):
        return np.asarray(x) + np.asarray(y)

    def neg(self, x):
        return -np.asarray(x)

    def sub(self, x, y):
        return np.asarray(x) - np.asarray(y)

    def in_range(self, x):
        return np.abs(np.asarray(x)) < self.k

    @property
    def key_base(self) -> int:
        return 2 * self.k - 1

    @property
    def key_offset(self) -> int:
        return self.k - 1

    def value_to_json(self, v: int):
        return int(v)

    def value_from_json(self, data) -> int:
        return int(data)

    def format_value(self, v: int) -> str:
        return str(int(v))


ValueDomain = Union[GroupDomain, IntegerBand]


def group_domain(*moduli: int) -> GroupDomain:
    return GroupDomain(make_group(moduli))


def parse_domain(text: str) -> ValueDomain:
    """``"4"`` is the integer band of 4-flows, ``"z:4"`` is Z4, ``"z:2,2"`` is Z2xZ2."""
    text = text.strip()
    if text.lower().startswith("z:"):
        return GroupDomain(parse_group(text[2:]))
    try:
        return IntegerBand(int(text))
    except ValueError:
        raise InvalidInput(f"bad domain notation {text!r}") from None


def _coerce_value(domain: ValueDomain, v) -> int:
    if isinstance(v, GroupElem):
        if not isinstance(domain, GroupDomain):
            raise InvalidInput("group element given for an integer domain")
        return domain.group.index(v)
    return int(v)


@dataclass(frozen=True)
class Flow:
    domain: ValueDomain
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(_coerce_value(self.domain, v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.int64)

    def support(self) -> frozenset[int]:
        return frozenset(e for e, v in enumerate(self.values) if v != 0)

    def is_nowhere_zero(self) -> bool:
        return all(v != 0 for v in self.values)

    def elements(self) -> list[GroupElem]:
        if not isinstance(self.domain, GroupDomain):
            raise InvalidInput("elements() only applies to group flows")
        return [self.domain.group.element(v) for v in self.values]

    def __sub__(self, other: "Flow") -> "Flow":
        if other.domain != self.domain:
            raise InvalidInput("flows over different domains")
        return Flow(self.domain, tuple(int(x) for x in self.domain.sub(self.array(), other.array())))

    def __add__(self, other: "Flow") -> "Flow":
        if other.domain != self.domain:
            raise InvalidInput("flows over different domains")
        return Flow(self.domain, tuple(int(x) for x in self.domain.add(self.array(), other.array())))

    def to_json(self) -> dict:
        return {
            "domain": self.domain.notation(),
            "values": [self.domain.value_to_json(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Flow":
        domain = parse_domain(str(data["domain"]))
        return cls(domain, tuple(domain.value_from_json(v) for v in data["values"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def support(f: Flow) -> frozenset[int]:
    return f.support()


def is_nowhere_zero(f: Flow) -> bool:
    return f.is_nowhere_zero()


@dataclass(frozen=True)
class Boundary:
    domain: ValueDomain
    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(_coerce_value(self.domain, v) for v in self.values)
        object.__setattr__(self, "values", vals)
        total = np.zeros((), dtype=np.int64)
        for v in vals:
            total = self.domain.add(total, v)
        if int(total) != 0:
            raise InvalidInput("boundary values must sum to zero")

    @classmethod
    def zero(cls, domain: ValueDomain, n: int) -> "Boundary":
        return cls(domain, (0,) * n)


def excess(g: OrientedMultigraph, domain: ValueDomain, values) -> np.ndarray:
    """``delta f(v)`` = outflow minus inflow, for a single value vector."""
    values = np.asarray(values, dtype=np.int64)
    out = np.zeros(g.n, dtype=np.int64)
    for e, (t, h) in enumerate(g.arcs):
        out[t] = domain.add(out[t], values[e])
        out[h] = domain.sub(out[h], values[e])
    return out


def verify_flow(g: OrientedMultigraph, f: Flow, beta: Boundary | None = None) -> bool:
    if len(f.values) != g.m:
        raise InvalidInput(f"flow has {len(f.values)} values for {g.m} edges")
    vals = f.array()
    bad = np.flatnonzero(~f.domain.in_range(vals))
    if bad.size:
        e = int(bad[0])
        raise InvalidInput(f"value {vals[e]} on edge {e} is outside the band of {f.domain}")
    if isinstance(f.domain, GroupDomain) and ((vals < 0) | (vals >= f.domain.size)).any():
        raise InvalidInput("group value index out of range")
    ex = excess(g, f.domain, vals)
    target = np.zeros(g.n, dtype=np.int64) if beta is None else np.asarray(beta.values, dtype=np.int64)
    for v in range(g.n):
        if ex[v] != target[v]:
            raise ConservationError(v, f.domain.format_value(ex[v]), f.domain.format_value(target[v]))
    return True


def is_flow(g: OrientedMultigraph, f: Flow, beta: Boundary | None = None) -> bool:
    try:
        return verify_flow(g, f, beta)
    except (ConservationError, InvalidInput):
        return False


# -- enumeration -----------------------------------------------------------


def search_size(g: OrientedMultigraph, domain: ValueDomain) -> int:
    d = len(g.spanning_tree.cotree_edges)
    return len(domain.free_values()) ** d


def _forced(g: OrientedMultigraph, domain: ValueDomain, cot: np.ndarray, beta: np.ndarray | None) -> np.ndarray:
    """Complete cotree assignments to flows, dropping rows with a zero or out-of-band tree value."""
    tree = g.spanning_tree
    rows = cot.shape[0]
    vals = np.zeros((rows, g.m), dtype=np.int64)
    vals[:, list(tree.cotree_edges)] = cot
    for v in reversed(tree.bfs_order[1:]):
        t = tree.parent_edge[v]
        acc = np.zeros(vals.shape[0], dtype=np.int64)
        for e, sign in g.incidence[v]:
            if e == t:
                continue
            acc = domain.add(acc, vals[:, e]) if sign == 1 else domain.sub(acc, vals[:, e])
        rhs = domain.sub(np.int64(0 if beta is None else beta[v]), acc)
        # sign_t * val_t = rhs
        val = rhs if g.arcs[t][0] == v else domain.neg(rhs)
        keep = (val != 0) & domain.in_range(val)
        vals = vals[keep]
        vals[:, t] = val[keep]
        if not vals.shape[0]:
            break
    return vals


def canonical_sort(arr: np.ndarray) -> np.ndarray:
    if arr.shape[0] <= 1 or arr.shape[1] == 0:
        return arr
    order = np.lexsort(arr.T[::-1])
    return arr[order]


def enumerate_flow_array(
    g: OrientedMultigraph,
    domain: ValueDomain,
    beta: Boundary | None = None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> np.ndarray:
    """All nowhere-zero flows as an ``(N, |E|)`` array in canonical order."""
    if not g.is_connected():
        raise PreconditionError("flow enumeration needs a connected graph")
    tree = g.spanning_tree
    d = len(tree.cotree_edges)
    free = domain.free_values()
    total = len(free) ** d
    if total > budget:
        raise BudgetExceeded(f"{total} cotree assignments exceed budget {budget}")
    b = None if beta is None else np.asarray(beta.values, dtype=np.int64)
    if d == 0:
        out = _forced(g, domain, np.zeros((1, 0), dtype=np.int64), b)
        return canonical_sort(out)
    tail = 0
    while tail < d and len(free) ** (tail + 1) <= _BLOCK:
        tail += 1
    tail = max(tail, 1)
    grid = np.array(list(itertools.product(free, repeat=tail)), dtype=np.int64).reshape(-1, tail)
    chunks = []
    for prefix in itertools.product(free, repeat=d - tail):
        cot = np.empty((grid.shape[0], d), dtype=np.int64)
        cot[:, : d - tail] = prefix
        cot[:, d - tail :] = grid
        got = _forced(g, domain, cot, b)
        if got.shape[0]:
            chunks.append(got)
    if not chunks:
        return np.zeros((0, g.m), dtype=np.int64)
    return canonical_sort(np.concatenate(chunks))


def enumerate_nz_flows(
    g: OrientedMultigraph,
    domain: ValueDomain,
    beta: Boundary | None = None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> list[Flow]:
    arr = enumerate_flow_array(g, domain, beta, budget)
    return [Flow(domain, tuple(int(x) for x in row)) for row in arr]


def count_nz_flows(g, domain, beta=None, budget=DEFAULT_ENUM_BUDGET) -> int:
    return int(enumerate_flow_array(g, domain, beta, budget).shape[0])


# -- conversions -------------------------------------------------------------


def project_mod_k(f: Flow) -> Flow:
    if not isinstance(f.domain, IntegerBand):
        raise InvalidInput("projection applies to integer flows")
    k = f.domain.k
    return Flow(GroupDomain(make_group([k])), tuple(v % k for v in f.values))


def _cyclic_modulus(domain: ValueDomain) -> int:
    if not isinstance(domain, GroupDomain) or domain.group.rank != 1:
        raise InvalidInput("expected a flow over a cyclic group Z_k")
    return domain.group.moduli[0]


def _tutte_lift(g: OrientedMultigraph, f: Flow) -> tuple[Flow, int]:
    k = _cyclic_modulus(f.domain)
    verify_flow(g, f)
    if not f.is_nowhere_zero():
        raise InvalidInput("tutte_lift needs a nowhere-zero flow")
    val = list(f.values)  # representatives in 1..k-1
    ex = [0] * g.n
    for e, (t, h) in enumerate(g.arcs):
        ex[t] += val[e]
        ex[h] -= val[e]
    rounds = 0
    while True:
        pos = [v for v in range(g.n) if ex[v] > 0]
        if not pos:
            break
        x = pos[0]
        via: dict[int, tuple[int, int]] = {x: (-1, 0)}
        queue = deque([x])
        target = None
        while queue and target is None:
            v = queue.popleft()
            for e, sign in g.incidence[v]:
                w = g.other_end(e, v)
                if w in via:
                    continue
                # leaving along the arc needs a positive value, against it a negative one
                if (sign == 1 and val[e] >= 1) or (sign == -1 and val[e] <= -1):
                    via[w] = (e, sign)
                    if ex[w] < 0:
                        target = w
                        break
                    queue.append(w)
        if target is None:
            raise AssertionError("no negative-excess vertex reachable; input is not a flow")
        v = target
        while v != x:
            e, sign = via[v]
            val[e] -= sign * k
            v = g.other_end(e, v)
        ex[x] -= k
        ex[target] += k
        rounds += 1
    return Flow(IntegerBand(k), tuple(val)), rounds


def tutte_lift(g: OrientedMultigraph, f: Flow) -> Flow:
    """A nowhere-zero integer k-flow congruent to the Z_k-flow ``f`` edgewise."""
    return _tutte_lift(g, f)[0]


def add_cycle(f: Flow, c: SignedCycle, a) -> Flow:
    """``f + a`` along ``c`` (each edge gets ``sign * a``)."""
    a = _coerce_value(f.domain, a)
    if a == 0:
        raise InvalidInput("adding the zero value along a cycle is not a move")
    vals = f.array()
    for e, s in c.entries:
        vals[e] = f.domain.add(vals[e], a) if s == 1 else f.domain.sub(vals[e], a)
    bad = np.flatnonzero(~f.domain.in_range(vals))
    if bad.size:
        raise InvalidInput(f"value {vals[bad[0]]} on edge {bad[0]} leaves the band of {f.domain}")
    return Flow(f.domain, tuple(int(x) for x in vals))


def cycle_flow(g: OrientedMultigraph, domain: ValueDomain, c: SignedCycle, a) -> Flow:
    return add_cycle(Flow(domain, (0,) * g.m), c, a)


def flows_to_json(flows: Iterable[Flow]) -> list[dict]:
    return [f.to_json() for f in flows]


def flow_from_values(domain: ValueDomain, values: Sequence) -> Flow:
    return Flow(domain, tuple(values))
