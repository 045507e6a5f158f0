"""Graph6 I/O, named graph generators and the exhaustive census runner."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from multiprocessing import Pool
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, InvalidInput
from .flows import DEFAULT_ENUM_BUDGET, Flow, parse_domain
from .multigraph import OrientedMultigraph, is_k_edge_connected
from .reconfig import build


# -- graph6 --------------------------------------------------------------------


def _decode_n(data: str) -> tuple[int, int]:
    if not data:
        raise InvalidInput("empty graph6 string")
    if data[0] != "~":
        return ord(data[0]) - 63, 1
    if len(data) >= 2 and data[1] == "~":
        if len(data) < 8:
            raise InvalidInput("truncated graph6 size field")
        n = 0
        for ch in data[2:8]:
            n = (n << 6) | (ord(ch) - 63)
        return n, 8
    if len(data) < 4:
        raise InvalidInput("truncated graph6 size field")
    n = 0
    for ch in data[1:4]:
        n = (n << 6) | (ord(ch) - 63)
    return n, 4


def parse_graph6(line: str) -> OrientedMultigraph:
    """Decode one graph6 line; each edge is oriented from its lower vertex."""
    data = line.strip()
    if data.startswith(">>graph6<<"):
        data = data[10:]
    for ch in data:
        if not 63 <= ord(ch) <= 126:
            raise InvalidInput(f"character {ch!r} is not valid graph6")
    n, pos = _decode_n(data)
    if n < 1:
        raise InvalidInput("graph6 graph without vertices")
    nbits = n * (n - 1) // 2
    body = data[pos:]
    need = (nbits + 5) // 6
    if len(body) != need:
        raise InvalidInput(f"graph6 body has {len(body)} chars, expected {need} for n={n}")
    bits = []
    for ch in body:
        x = ord(ch) - 63
        bits.extend((x >> s) & 1 for s in range(5, -1, -1))
    if any(bits[nbits:]):
        raise InvalidInput("nonzero graph6 padding bits")
    edges = []
    b = 0
    for j in range(1, n):
        for i in range(j):
            if bits[b]:
                edges.append((i, j))
            b += 1
    edges.sort()
    return OrientedMultigraph(n, tuple(edges), data)


def write_graph6(g: OrientedMultigraph) -> str:
    if g.has_parallel_edges():
        raise InvalidInput("graph6 cannot encode parallel edges")
    n = g.n
    if n <= 62:
        out = [chr(n + 63)]
    elif n <= 258047:
        out = ["~"] + [chr(((n >> s) & 63) + 63) for s in (12, 6, 0)]
    else:
        raise InvalidInput("graph too large for graph6")
    adj = {(min(t, h), max(t, h)) for t, h in g.arcs}
    bits = [1 if (i, j) in adj else 0 for j in range(1, n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    for k in range(0, len(bits), 6):
        x = 0
        for b in bits[k : k + 6]:
            x = (x << 1) | b
        out.append(chr(x + 63))
    return "".join(out)


# -- generators ------------------------------------------------------------------


def k4() -> OrientedMultigraph:
    return complete(4)


def complete(n: int) -> OrientedMultigraph:
    if n < 2:
        raise InvalidInput("complete graph needs n >= 2")
    return OrientedMultigraph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)), f"K{n}")


def dipole(m: int) -> OrientedMultigraph:
    if m < 2:
        raise InvalidInput("dipole needs m >= 2")
    return OrientedMultigraph(2, ((0, 1),) * m, f"D{m}")


def cycle(m: int) -> OrientedMultigraph:
    if m < 2:
        raise InvalidInput("cycle needs m >= 2")
    return OrientedMultigraph(m, tuple((i, (i + 1) % m) for i in range(m)), f"C{m}")


def path(n: int) -> OrientedMultigraph:
    return OrientedMultigraph(n, tuple((i, i + 1) for i in range(n - 1)), f"P{n}")


def moebius_ladder(n: int) -> OrientedMultigraph:
    """The Moebius ladder on 2n vertices: a 2n-cycle plus its n long diagonals."""
    if n < 2:
        raise InvalidInput("moebius ladder needs n >= 2")
    rim = [(i, (i + 1) % (2 * n)) for i in range(2 * n)]
    rungs = [(i, i + n) for i in range(n)]
    return OrientedMultigraph(2 * n, tuple(rim + rungs), f"M{2 * n}")


def prism(n: int) -> OrientedMultigraph:
    if n < 3:
        raise InvalidInput("prism needs n >= 3")
    outer = [(i, (i + 1) % n) for i in range(n)]
    inner = [(n + i, n + (i + 1) % n) for i in range(n)]
    rungs = [(i, n + i) for i in range(n)]
    return OrientedMultigraph(2 * n, tuple(outer + inner + rungs), f"Prism{n}")


def klee(expansion_seq: Sequence[int] = ()) -> OrientedMultigraph:
    """Start from K4 and replace the listed vertices by triangles, in order.

    The expanded vertex keeps its id for the triangle corner attached to its
    first neighbour; the two other corners are appended.
    """
    n = 4
    edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    for v in expansion_seq:
        if not 0 <= v < n:
            raise InvalidInput(f"cannot expand missing vertex {v}")
        inc = [i for i, e in enumerate(edges) if v in e]
        corners = [v, n, n + 1]
        n += 2
        for corner, i in zip(corners, inc):
            t, h = edges[i]
            u = h if t == v else t
            edges[i] = (min(u, corner), max(u, corner))
        edges += [(corners[0], corners[1]), (corners[0], corners[2]), (corners[1], corners[2])]
    return OrientedMultigraph(n, tuple(edges), f"Klee{list(expansion_seq)}")


def k33() -> OrientedMultigraph:
    return OrientedMultigraph(6, tuple((i, j) for i in range(3) for j in range(3, 6)), "K33")


def cube() -> OrientedMultigraph:
    edges = [(i, i ^ (1 << b)) for i in range(8) for b in range(3) if i < i ^ (1 << b)]
    return OrientedMultigraph(8, tuple(sorted(edges)), "Q3")


def petersen() -> OrientedMultigraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return OrientedMultigraph(10, tuple(outer + spokes + inner), "Petersen")


def wheel(m: int) -> OrientedMultigraph:
    """Hub 0 joined to every vertex of the rim cycle 1..m."""
    if m < 3:
        raise InvalidInput("wheel needs m >= 3")
    rim = [(1 + i, 1 + (i + 1) % m) for i in range(m)]
    spokes = [(0, 1 + i) for i in range(m)]
    return OrientedMultigraph(m + 1, tuple(spokes + rim), f"W{m}")


GENERATORS = {
    "k4": k4,
    "complete": complete,
    "dipole": dipole,
    "cycle": cycle,
    "path": path,
    "moebius": moebius_ladder,
    "prism": prism,
    "klee": lambda *seq: klee(seq),
    "k33": k33,
    "cube": cube,
    "petersen": petersen,
    "wheel": wheel,
}


def generate(spec: str) -> OrientedMultigraph:
    """Build a named graph from ``name[:arg[,arg...]]``, e.g. ``moebius:6``."""
    name, _, args = spec.partition(":")
    fn = GENERATORS.get(name.lower())
    if fn is None:
        raise InvalidInput(f"unknown generator {name!r}; known: {', '.join(sorted(GENERATORS))}")
    try:
        params = [int(a) for a in args.split(",") if a.strip()]
    except ValueError:
        raise InvalidInput(f"bad generator arguments {args!r}") from None
    return fn(*params)


# -- corpora ---------------------------------------------------------------------


def corpus_lines(name: str) -> list[str]:
    """Lines of a bundled corpus file, e.g. ``cubic_12``."""
    text = resources.files("flowreconf").joinpath("data", f"{name}.g6").read_text()
    return [ln.strip() for ln in text.splitlines() if ln.strip()]


def cubic_corpus(n: int) -> list[str]:
    return corpus_lines(f"cubic_{n:02d}")


def read_corpus(path: str) -> list[str]:
    with open(path) as fh:
        return [ln.strip() for ln in fh if ln.strip() and not ln.startswith(">>")]


def corpus_sanity(corpus: Iterable[str]) -> dict[int, int]:
    """Number of connected cubic graphs per vertex count; malformed lines are skipped."""
    counts: Counter = Counter()
    for line in corpus:
        try:
            g = parse_graph6(line)
        except InvalidInput:
            continue
        if g.is_cubic() and g.is_connected():
            counts[g.n] += 1
    return dict(sorted(counts.items()))


def small_test_graphs(max_vertices: int = 10) -> list[OrientedMultigraph]:
    """The bundled 2-edge-connected test set: small simple graphs, cubic graphs
    up to ``max_vertices`` vertices, and a few named multigraphs."""
    out = []
    for line in corpus_lines("small_connected"):
        g = parse_graph6(line)
        if g.n <= max_vertices and is_k_edge_connected(g, 2):
            out.append(g)
    for n in range(4, max_vertices + 1, 2):
        out.extend(parse_graph6(line) for line in cubic_corpus(n))
    out += [dipole(m) for m in range(2, 6)] + [wheel(4), wheel(5), k33(), cube()]
    if max_vertices >= 10:
        out.append(petersen())
    return [g for g in out if g.n <= max_vertices and is_k_edge_connected(g, 2)]


# -- census ----------------------------------------------------------------------


@dataclass
class CensusRecord:
    graph: str
    vertices: int
    edges: int
    stats: dict = field(default_factory=dict)
    skipped: str | None = None
    errors: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = {"graph": self.graph, "vertices": self.vertices, "edges": self.edges, "stats": self.stats}
        if self.skipped:
            d["skipped"] = self.skipped
        if self.errors:
            d["errors"] = self.errors
        return d


@dataclass(frozen=True)
class CensusFilters:
    cubic: bool = True
    min_edge_connectivity: int = 3


def _analyse(args) -> CensusRecord:
    line, domains, filters, budget, diameter = args
    try:
        g = parse_graph6(line)
    except InvalidInput as exc:
        return CensusRecord(line, 0, 0, skipped=f"malformed: {exc}")
    rec = CensusRecord(line, g.n, g.m)
    if filters.cubic and not g.is_cubic():
        rec.skipped = "not cubic"
        return rec
    if not g.is_connected():
        rec.skipped = "disconnected"
        return rec
    if filters.min_edge_connectivity > 1 and not is_k_edge_connected(g, filters.min_edge_connectivity):
        rec.skipped = f"not {filters.min_edge_connectivity}-edge-connected"
        return rec
    for text in domains:
        domain = parse_domain(text)
        try:
            r = build(g, domain, budget=budget)
            rec.stats[domain.notation()] = r.report(diameter=diameter)
        except BudgetExceeded as exc:
            rec.errors[domain.notation()] = f"budget: {exc}"
    return rec


def run_census(
    corpus: Iterable[str],
    domains: Sequence[str],
    filters: CensusFilters = CensusFilters(),
    jobs: int = 1,
    budget: int = DEFAULT_ENUM_BUDGET,
    diameter: bool = False,
) -> list[CensusRecord]:
    """Analyse every corpus graph passing ``filters`` over each domain.

    Records come back sorted by graph id whatever the corpus order or worker count.
    """
    domains = [parse_domain(d).notation() for d in domains]
    tasks = [(line, domains, filters, budget, diameter) for line in corpus]
    if jobs > 1:
        with Pool(jobs) as pool:
            records = list(pool.imap_unordered(_analyse, tasks, chunksize=4))
    else:
        records = [_analyse(t) for t in tasks]
    records.sort(key=lambda r: r.graph)
    return records


def summarize(records: Sequence[CensusRecord], domains: Sequence[str]) -> dict:
    domains = [parse_domain(d).notation() for d in domains]
    analysed = [r for r in records if not r.skipped]
    summary: dict = {
        "graphs": len(records),
        "analysed": len(analysed),
        "skipped": dict(Counter(r.skipped.split(":")[0] for r in records if r.skipped)),
        "domains": {},
    }
    for d in domains:
        rs = [r.stats[d] for r in analysed if d in r.stats]
        comp_counts = Counter(s["component_count"] for s in rs)
        summary["domains"][d] = {
            "analysed": len(rs),
            "nonempty": sum(1 for s in rs if s["flow_count"]),
            "connected": sum(1 for s in rs if s["connected"]),
            "connected_nonempty": sum(1 for s in rs if s["connected"] and s["flow_count"]),
            "perfect_matchings": sum(1 for s in rs if s["is_perfect_matching"]),
            "max_component_count": max(comp_counts) if comp_counts else 0,
            "component_count_histogram": dict(sorted(comp_counts.items())),
            "component_size_histogram": dict(sorted(Counter(x for s in rs for x in s["component_sizes"]).items())),
            "min_component_size": min((x for s in rs for x in s["component_sizes"]), default=None),
            "errors": sum(1 for r in analysed if d in r.errors),
        }
    if len(domains) > 1:
        summary["all_connected"] = sum(
            1
            for r in analysed
            if all(d in r.stats and r.stats[d]["connected"] and r.stats[d]["flow_count"] for d in domains)
        )
    return summary


def write_jsonl(records: Sequence[CensusRecord], summary: dict, fh) -> None:
    for r in records:
        fh.write(json.dumps(r.to_json()) + "\n")
    fh.write(json.dumps({"summary": summary}) + "\n")


def iter_jsonl(fh) -> Iterator[dict]:
    for line in fh:
        line = line.strip()
        if line:
            yield json.loads(line)


def find_low_degree_flows(
    corpus: Iterable[str],
    domain: str,
    max_degree: int = 1,
    filters: CensusFilters = CensusFilters(),
    budget: int = DEFAULT_ENUM_BUDGET,
) -> list[tuple[str, Flow, int]]:
    """First flow of minimum degree at most ``max_degree`` on each qualifying graph.

    Returns ``(graph id, flow, degree)`` triples in corpus order.
    """
    dom = parse_domain(domain)
    out = []
    for line in corpus:
        rec = _analyse((line, [], filters, budget, False))
        if rec.skipped:
            continue
        r = build(parse_graph6(line), dom, budget=budget)
        if not r.n:
            continue
        deg = r.degrees()
        i = int(np.argmin(deg))
        if deg[i] <= max_degree:
            out.append((line, r.flow(i), int(deg[i])))
    return out
