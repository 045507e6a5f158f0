"""Plane embeddings, duals, and the colouring/flow correspondence.

A face is stored as its boundary walk with the face on the left, each step
an ``(edge, side)`` pair where ``side`` says on which side of the arc the
face lies.  An arc traversed tail to head has the face on its left.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, InvalidInput, PreconditionError
from .flows import Flow, IntegerBand, ValueDomain, group_domain, verify_flow
from .multigraph import OrientedMultigraph, SignedCycle
from .pathbuild import ReconfigPath, mod_zero_path
from .reconfig import StateGraph

LEFT, RIGHT = "left", "right"
SIDES = (LEFT, RIGHT)

FaceWalk = tuple[tuple[int, str], ...]


@dataclass(frozen=True)
class PlaneEmbedding:
    graph: OrientedMultigraph
    faces: tuple[FaceWalk, ...]

    def __post_init__(self):
        validate_embedding(self)

    def face_of(self, e: int, side: str) -> int:
        return self._sides[(e, side)]

    @property
    def _sides(self) -> dict[tuple[int, str], int]:
        return {(e, s): i for i, walk in enumerate(self.faces) for e, s in walk}

    def face_cycle(self, face: int) -> SignedCycle:
        """Boundary of ``face`` oriented so that the face lies on the right."""
        walk = self.faces[face]
        return SignedCycle(tuple((e, 1 if s == RIGHT else -1) for e, s in reversed(walk)))

    def to_json(self) -> dict:
        return {
            "vertices": self.graph.n,
            "arcs": [list(a) for a in self.graph.arcs],
            "faces": [[{"edge": e, "side": s} for e, s in walk] for walk in self.faces],
        }


def _walk_ends(g: OrientedMultigraph, e: int, side: str) -> tuple[int, int]:
    t, h = g.arcs[e]
    return (t, h) if side == LEFT else (h, t)


def validate_embedding(emb: PlaneEmbedding) -> None:
    g = emb.graph
    seen: dict[tuple[int, str], int] = {}
    for i, walk in enumerate(emb.faces):
        if not walk:
            raise InvalidInput(f"face {i} is empty")
        for j, (e, s) in enumerate(walk):
            if s not in SIDES or not 0 <= e < g.m:
                raise InvalidInput(f"face {i} has a bad entry {(e, s)}")
            if (e, s) in seen:
                raise InvalidInput(f"edge {e} appears twice on its {s} side")
            seen[(e, s)] = i
            nxt = walk[(j + 1) % len(walk)]
            if _walk_ends(g, e, s)[1] != _walk_ends(g, *nxt)[0]:
                raise InvalidInput(f"face {i} is not a closed walk at entry {j}")
    if len(seen) != 2 * g.m:
        raise InvalidInput("every edge must appear once on each side")
    if not g.is_connected():
        raise InvalidInput("embedded graph must be connected")
    if g.n - g.m + len(emb.faces) != 2:
        raise InvalidInput(f"Euler check fails: {g.n} - {g.m} + {len(emb.faces)} != 2")


def embedding_from_rotation(g: OrientedMultigraph, rotation: Sequence[Sequence[int]]) -> PlaneEmbedding:
    """Faces traced from a rotation system (counter-clockwise edge order at each vertex).

    Parallel edges are listed once per copy; the dart at ``v`` of edge ``e``
    is identified by ``(e, v)``.
    """
    if len(rotation) != g.n:
        raise InvalidInput("rotation needs one cyclic order per vertex")
    pos = {}
    for v, order in enumerate(rotation):
        if sorted(order) != sorted(e for e, _ in g.incidence[v]):
            raise InvalidInput(f"rotation at {v} does not list its incident edges")
        for i, e in enumerate(order):
            pos[(v, e)] = i
    used: set[tuple[int, str]] = set()
    faces = []
    for e0 in range(g.m):
        for s0 in SIDES:
            if (e0, s0) in used:
                continue
            walk = []
            e, s = e0, s0
            while (e, s) not in used:
                used.add((e, s))
                walk.append((e, s))
                v = _walk_ends(g, e, s)[1]
                order = rotation[v]
                # next dart: clockwise neighbour of the arriving edge
                nxt = order[(pos[(v, e)] - 1) % len(order)]
                t, h = g.arcs[nxt]
                s = LEFT if t == v else RIGHT
                e = nxt
            faces.append(tuple(walk))
    return PlaneEmbedding(g, tuple(faces))


def embedding_from_coordinates(g: OrientedMultigraph, xy: Sequence[tuple[float, float]]) -> PlaneEmbedding:
    """Rotation system read off a straight-line drawing (simple graphs only)."""
    if g.has_parallel_edges():
        raise InvalidInput("straight-line drawings cannot separate parallel edges")
    rot = []
    for v in range(g.n):
        def angle(e, v=v):
            w = g.other_end(e, v)
            return math.atan2(xy[w][1] - xy[v][1], xy[w][0] - xy[v][0])
        rot.append(sorted((e for e, _ in g.incidence[v]), key=angle))
    return embedding_from_rotation(g, rot)


def load_embedding(path: str | Path) -> PlaneEmbedding:
    return embedding_from_json(json.loads(Path(path).read_text()))


def embedding_from_json(data: dict) -> PlaneEmbedding:
    try:
        g = OrientedMultigraph(int(data["vertices"]), tuple((int(t), int(h)) for t, h in data["arcs"]))
        faces = tuple(tuple((int(x["edge"]), str(x["side"])) for x in walk) for walk in data["faces"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed embedding: {exc}") from exc
    return PlaneEmbedding(g, faces)


# -- standard embeddings -----------------------------------------------------------


def k4_embedding() -> PlaneEmbedding:
    from .census import k4

    return embedding_from_coordinates(k4(), [(0, 2), (-2, -1), (2, -1), (0, 0)])


def dipole_embedding(m: int) -> PlaneEmbedding:
    from .census import dipole

    g = dipole(m)
    return embedding_from_rotation(g, [list(range(m)), list(range(m))[::-1]])


def cube_embedding() -> PlaneEmbedding:
    from .census import cube

    xy = [((1 if v & 1 else -1) * (1 if v & 4 else 2), (1 if v & 2 else -1) * (1 if v & 4 else 2)) for v in range(8)]
    return embedding_from_coordinates(cube(), xy)


def wheel_embedding(m: int) -> PlaneEmbedding:
    from .census import wheel

    xy = [(0.0, 0.0)] + [(math.cos(2 * math.pi * i / m), math.sin(2 * math.pi * i / m)) for i in range(m)]
    return embedding_from_coordinates(wheel(m), xy)


def fan_embedding(n: int = 6) -> PlaneEmbedding:
    """Outerplanar triangulated n-gon: the rim plus chords from vertex 0."""
    rim = [(i, (i + 1) % n) for i in range(n)]
    chords = [(0, j) for j in range(2, n - 1)]
    g = OrientedMultigraph(n, tuple(rim + chords), f"fan{n}")
    xy = [(math.cos(2 * math.pi * i / n), math.sin(2 * math.pi * i / n)) for i in range(n)]
    return embedding_from_coordinates(g, xy)


def standard_embeddings() -> dict[str, PlaneEmbedding]:
    out = {"k4": k4_embedding(), "cube": cube_embedding(), "fan6": fan_embedding(6), "wheel5": wheel_embedding(5)}
    for m in range(2, 7):
        out[f"dipole{m}"] = dipole_embedding(m)
    return out


# -- duals and colourings ----------------------------------------------------------


@dataclass(frozen=True)
class DualGraph:
    embedding: PlaneEmbedding
    graph: OrientedMultigraph  # arc e* runs from the left face of e to its right face

    @property
    def primal(self) -> OrientedMultigraph:
        return self.embedding.graph


def build_dual(emb: PlaneEmbedding) -> DualGraph:
    arcs = tuple((emb.face_of(e, LEFT), emb.face_of(e, RIGHT)) for e in range(emb.graph.m))
    if any(t == h for t, h in arcs):
        raise PreconditionError("primal has a bridge, so the dual has a loop")
    return DualGraph(emb, OrientedMultigraph(len(emb.faces), arcs, f"dual({emb.graph.name})"))


def is_proper(h: OrientedMultigraph, colors: Sequence[int]) -> bool:
    return all(colors[t] != colors[u] for t, u in h.arcs)


def induced_flow(dual: DualGraph, colors: Sequence[int], domain: ValueDomain) -> Flow:
    """Flow ``c(head e*) - c(tail e*)``; group colours are indices, integer colours lie in 1..k."""
    h = dual.graph
    if len(colors) != h.n:
        raise InvalidInput("one colour per face is required")
    if not is_proper(h, colors):
        raise InvalidInput("colouring is not proper")
    c = np.asarray(colors, dtype=np.int64)
    tails = np.array([t for t, _ in h.arcs], dtype=np.int64)
    heads = np.array([u for _, u in h.arcs], dtype=np.int64)
    if isinstance(domain, IntegerBand):
        if c.min() < 1 or c.max() > domain.k:
            raise InvalidInput(f"integer colours must lie in 1..{domain.k}")
        vals = c[heads] - c[tails]
    else:
        if c.min() < 0 or c.max() >= domain.size:
            raise InvalidInput("group colours must be element indices")
        vals = domain.sub(c[heads], c[tails])
    return Flow(domain, tuple(int(x) for x in vals))


def coloring_from_flow(dual: DualGraph, f: Flow, root: int = 0, root_color: int = 0) -> tuple[int, ...]:
    """Propagate colours across the dual from ``root``; consistent exactly when ``f`` is a flow."""
    if not f.is_nowhere_zero():
        raise PreconditionError("colouring needs a nowhere-zero flow")
    dom = f.domain
    h = dual.graph
    col: list[int | None] = [None] * h.n
    col[root] = root_color
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for e, s in h.incidence[x]:
            y = h.other_end(e, x)
            want = int(dom.add(col[x], f.values[e]) if s == 1 else dom.sub(col[x], f.values[e]))
            if col[y] is None:
                col[y] = want
                queue.append(y)
            elif col[y] != want:
                raise InvalidInput("values around a vertex do not cancel; input is not a flow")
    return tuple(int(c) for c in col)


def associated_coloring(dual: DualGraph, f: Flow) -> tuple[int, ...]:
    """A proper 1..k colouring whose induced flow agrees with the k-flow ``f`` mod k."""
    if not isinstance(f.domain, IntegerBand):
        raise InvalidInput("associated_coloring takes an integer k-flow")
    k = f.domain.k
    zk = group_domain(k)
    best = None
    # among the k shifts of the mod-k colouring, keep the one agreeing with f on most edges
    for r in range(k):
        res = coloring_from_flow(dual, Flow(zk, tuple(v % k for v in f.values)), 0, r)
        col = tuple(x if x else k for x in res)
        agree = sum(a == b for a, b in zip(induced_flow(dual, col, f.domain).values, f.values))
        if best is None or agree > best[0]:
            best = (agree, col)
    return best[1]


# -- recolouring graphs ------------------------------------------------------------


class RecolorGraph(StateGraph):
    """Proper colourings of ``h`` joined when they differ on one vertex."""

    def __init__(self, h: OrientedMultigraph, colorings: np.ndarray, pairs: np.ndarray, palette: Sequence[int]):
        super().__init__(colorings.shape[0], pairs)
        self.host = h
        self.colorings = colorings
        self.palette = tuple(palette)
        self._index = {tuple(int(x) for x in row): i for i, row in enumerate(colorings)}

    def coloring(self, i: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.colorings[i])

    def index_of(self, colors: Sequence[int]) -> int:
        return self._index[tuple(int(x) for x in colors)]


def enumerate_colorings(h: OrientedMultigraph, k: int, budget: int = 1 << 24) -> np.ndarray:
    """All proper colourings with colours ``0..k-1``, lexicographically sorted."""
    if k ** h.n > budget:
        raise BudgetExceeded(f"{k}^{h.n} colourings exceed the budget of {budget}")
    if any(t == u for t, u in h.arcs):
        raise InvalidInput("host graph has a loop")
    rows = np.zeros((1, 0), dtype=np.int64)
    for v in range(h.n):
        rows = np.repeat(rows, k, axis=0)
        rows = np.hstack([rows, np.tile(np.arange(k), rows.shape[0] // k)[:, None]])
        ok = np.ones(rows.shape[0], dtype=bool)
        for t, u in h.arcs:
            if max(t, u) == v:
                ok &= rows[:, t] != rows[:, u]
        rows = rows[ok]
    return rows


def recolor_graph(h: OrientedMultigraph, k: int, palette_start: int = 0, budget: int = 1 << 24) -> RecolorGraph:
    cols = enumerate_colorings(h, k, budget)
    pairs = []
    weights = k ** np.arange(h.n, dtype=np.int64)
    for v in range(h.n):
        key = (cols * weights).sum(axis=1) - cols[:, v] * weights[v]
        order = np.argsort(key, kind="stable")
        sk = key[order]
        starts = np.flatnonzero(np.r_[True, sk[1:] != sk[:-1]])
        ends = np.r_[starts[1:], sk.size]
        for a, b in zip(starts, ends):
            grp = order[a:b]
            if grp.size > 1:
                i, j = np.triu_indices(grp.size, 1)
                pairs.append(np.stack([grp[i], grp[j]], axis=1))
    pairs_arr = np.concatenate(pairs) if pairs else np.zeros((0, 2), dtype=np.int64)
    return RecolorGraph(h, cols + palette_start, pairs_arr, range(palette_start, palette_start + k))


# -- transfer ------------------------------------------------------------------


def _check_color_path(dual: DualGraph, color_path: Sequence[Sequence[int]]) -> list[int]:
    faces = []
    for a, b in zip(color_path, color_path[1:]):
        diff = [i for i, (x, y) in enumerate(zip(a, b)) if x != y]
        if len(diff) != 1:
            raise InvalidInput("consecutive colourings must differ on exactly one face")
        faces.append(diff[0])
    for c in color_path:
        if not is_proper(dual.graph, c):
            raise InvalidInput("colour path contains an improper colouring")
    return faces


def transfer_color_path(
    dual: DualGraph,
    color_path: Sequence[Sequence[int]],
    domain: ValueDomain,
    start: Flow | None = None,
    end: Flow | None = None,
) -> ReconfigPath:
    """Turn a recolouring sequence into a flow path, one face-boundary move per recolouring.

    For integer bands, optional ``start``/``end`` flows congruent mod k to the
    first and last induced flows are joined by zero-difference legs.
    """
    g = dual.primal
    if not color_path:
        if start is None:
            raise InvalidInput("empty colour path needs a start flow")
        return ReconfigPath([start])
    faces = _check_color_path(dual, color_path)
    first = induced_flow(dual, color_path[0], domain)
    if isinstance(domain, IntegerBand) and start is not None:
        path = mod_zero_path(g, start, first)
    else:
        path = ReconfigPath([first])
    for face, a, b in zip(faces, color_path, color_path[1:]):
        if isinstance(domain, IntegerBand):
            delta = int(b[face]) - int(a[face])
        else:
            delta = int(domain.sub(b[face], a[face]))
        path.push(dual.embedding.face_cycle(face), delta)
    if isinstance(domain, IntegerBand) and end is not None:
        path.extend(mod_zero_path(g, path.end, end))
    return path


def flow_path_via_duality(emb: PlaneEmbedding, f1: Flow, f2: Flow) -> ReconfigPath | None:
    """A flow path obtained from a shortest recolouring path in the dual; None if none exists."""
    dual = build_dual(emb)
    dom = f1.domain
    if isinstance(dom, IntegerBand):
        c1, c2 = associated_coloring(dual, f1), associated_coloring(dual, f2)
        rg = recolor_graph(dual.graph, dom.k, palette_start=1)
        targets = [c2]
    else:
        c1 = coloring_from_flow(dual, f1)
        rg = recolor_graph(dual.graph, dom.size)
        targets = [coloring_from_flow(dual, f2, 0, r) for r in range(dom.size)]
    src = rg.index_of(c1)
    best = None
    for t in targets:
        p = rg.shortest_path(src, rg.index_of(t))
        if p is not None and (best is None or len(p) < len(best)):
            best = p
    if best is None:
        return None
    colors = [rg.coloring(i) for i in best]
    if isinstance(dom, IntegerBand):
        return transfer_color_path(dual, colors, dom, start=f1, end=f2)
    return transfer_color_path(dual, colors, dom)


def check_face_moves(emb: PlaneEmbedding, domain: ValueDomain) -> bool:
    """Every recolouring edge of the dual induces a single face-boundary flow move."""
    dual = build_dual(emb)
    k = domain.k if isinstance(domain, IntegerBand) else domain.size
    start = 1 if isinstance(domain, IntegerBand) else 0
    rg = recolor_graph(dual.graph, k, palette_start=start)
    for i, j in rg.edges():
        p = transfer_color_path(dual, [rg.coloring(i), rg.coloring(j)], domain)
        p.validate(emb.graph)
        verify_flow(emb.graph, p.end)
    return True
