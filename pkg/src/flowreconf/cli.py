"""Command-line entry point: ``flowreconf <command> ...``.

Exit codes: 0 success, 2 search budget exceeded, 3 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import census, kempe3, pathbuild, planardual
from .errors import BudgetExceeded, FlowReconfError, InvalidInput, PreconditionError
from .flows import DEFAULT_ENUM_BUDGET, Flow, IntegerBand, enumerate_flow_array, parse_domain
from .multigraph import OrientedMultigraph, validate
from .reconfig import build

EXIT_OK, EXIT_BUDGET, EXIT_MALFORMED = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_MALFORMED, f"{self.prog}: error: {message}\n")


def load_graph(spec: str) -> OrientedMultigraph:
    """``gen:<name>[:args]``, a graph6 file (first line), or a JSON ``{vertices, arcs}`` file."""
    if spec.startswith("gen:"):
        return census.generate(spec[4:])
    path = Path(spec)
    if not path.exists():
        raise InvalidInput(f"no such graph file: {spec}")
    text = path.read_text().strip()
    if text.startswith("{"):
        data = json.loads(text)
        return OrientedMultigraph(int(data["vertices"]), tuple((int(t), int(h)) for t, h in data["arcs"]), path.stem)
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith(">>")]
    if not lines:
        raise InvalidInput(f"{spec} contains no graph")
    return census.parse_graph6(lines[0])


def _load_flow(path: str) -> Flow:
    try:
        return Flow.from_json(json.loads(Path(path).read_text()))
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"cannot read flow from {path}: {exc}") from exc


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=None if isinstance(obj, list) else 2)
    sys.stdout.write("\n")


def cmd_enumerate(args) -> int:
    g = load_graph(args.graph)
    domain = parse_domain(args.domain)
    arr = enumerate_flow_array(g, domain, budget=args.budget)
    out = {"graph": g.name, "domain": domain.notation(), "count": int(arr.shape[0])}
    if not args.count_only:
        out["flows"] = [Flow(domain, tuple(int(x) for x in row)).to_json()["values"] for row in arr]
    _emit(out)
    return EXIT_OK


def cmd_reconfig(args) -> int:
    g = load_graph(args.graph)
    rep = {"graph": g.name, **validate(g)}
    for d in args.domain:
        rep[parse_domain(d).notation()] = build(g, parse_domain(d), budget=args.budget).report(diameter=args.diameter)
    _emit(rep)
    return EXIT_OK


def cmd_path(args) -> int:
    g = load_graph(args.graph)
    f1, f2 = _load_flow(args.from_), _load_flow(args.to)
    if f1.domain != f2.domain:
        raise InvalidInput("endpoint flows live in different domains")
    for f in (f1, f2):
        if len(f) != g.m or not f.is_nowhere_zero():
            raise InvalidInput("endpoints must be nowhere-zero flows on the given graph")
    method = args.method
    dom = f1.domain
    if method == "auto":
        if isinstance(dom, IntegerBand) and all((a - b) % dom.k == 0 for a, b in zip(f1.values, f2.values)):
            method = "modzero"
        elif not isinstance(dom, IntegerBand) and dom.group.rank >= 2:
            method = "product"
        else:
            method = "shortest"
    if method == "product":
        try:
            path = pathbuild.product_path(g, f1, f2)
        except PreconditionError:
            if args.method == "product":
                raise
            method = "shortest"
    if method == "modzero":
        path = pathbuild.mod_zero_path(g, f1, f2)
    if method == "shortest":
        rg = build(g, dom, budget=args.budget)
        seq = rg.shortest_path(rg.index_of(f1), rg.index_of(f2))
        if seq is None:
            _emit({"method": method, "connected": False, "moves": None})
            return EXIT_OK
        path = pathbuild.path_from_flows(g, [rg.flow(i) for i in seq])
    path.validate(g)
    _emit({"method": method, **path.to_json()})
    return EXIT_OK


def cmd_dual(args) -> int:
    emb = planardual.load_embedding(args.embedding)
    dual = planardual.build_dual(emb)
    domain = parse_domain(args.domain)
    k = domain.k if isinstance(domain, IntegerBand) else domain.size
    rg = planardual.recolor_graph(dual.graph, k, palette_start=1 if isinstance(domain, IntegerBand) else 0)
    fg = build(emb.graph, domain, budget=args.budget)
    _emit(
        {
            "faces": len(emb.faces),
            "dual_arcs": [list(a) for a in dual.graph.arcs],
            "domain": domain.notation(),
            "colorings": rg.n,
            "coloring_components": int(rg.n_components),
            "flows": fg.n,
            "flow_components": int(fg.n_components),
        }
    )
    return EXIT_OK


def cmd_kempe(args) -> int:
    g = load_graph(args.graph)
    kg = kempe3.build_kempe_graph(g)
    out = {
        "graph": g.name,
        "colorings": kg.n,
        "kempe_components": int(kg.n_components),
        "component_sizes": kg.component_sizes(),
    }
    if kg.n:
        out["correspondence"] = kempe3.verify_correspondence(g)
    _emit(out)
    return EXIT_OK


def _corpus(spec: str) -> list[str]:
    if Path(spec).exists():
        return census.read_corpus(spec)
    try:
        return census.corpus_lines(spec)
    except FileNotFoundError:
        raise InvalidInput(f"no corpus file or bundled corpus named {spec!r}") from None


def cmd_census(args) -> int:
    corpus = _corpus(args.corpus)
    domains = args.domains.split()
    filters = census.CensusFilters(cubic=not args.any_degree, min_edge_connectivity=args.min_edge_connectivity)
    records = census.run_census(corpus, domains, filters, jobs=args.jobs, budget=args.budget, diameter=args.diameter)
    summary = census.summarize(records, domains)
    if args.out:
        with open(args.out, "w") as fh:
            census.write_jsonl(records, summary, fh)
    _emit(summary)
    return EXIT_BUDGET if any(r.errors for r in records) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="flowreconf", description="Nowhere-zero flow reconfiguration toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def graph_cmd(name, help):
        s = sub.add_parser(name, help=help)
        s.add_argument("--graph", required=True, help="graph file (graph6 or JSON) or gen:<name>[:args]")
        s.add_argument("--budget", type=int, default=DEFAULT_ENUM_BUDGET, help="max enumerated assignments")
        return s

    s = graph_cmd("enumerate", "list nowhere-zero flows")
    s.add_argument("--domain", required=True, help='"4" (integer), "z:4" or "z:2,2"')
    s.add_argument("--count-only", action="store_true")
    s.set_defaults(func=cmd_enumerate)

    s = graph_cmd("reconfig", "reconfiguration graph statistics")
    s.add_argument("--domain", required=True, action="append")
    s.add_argument("--diameter", action="store_true", help="also report per-component diameters")
    s.set_defaults(func=cmd_reconfig)

    s = graph_cmd("path", "reconfiguration path between two flows")
    s.add_argument("--from", dest="from_", required=True, help="start flow JSON")
    s.add_argument("--to", required=True, help="end flow JSON")
    s.add_argument("--method", choices=["auto", "product", "modzero", "shortest"], default="auto")
    s.set_defaults(func=cmd_path)

    s = sub.add_parser("dual", help="dual graph and recolouring statistics of a plane embedding")
    s.add_argument("--embedding", required=True, help="JSON {vertices, arcs, faces}")
    s.add_argument("--domain", default="z:4")
    s.add_argument("--budget", type=int, default=DEFAULT_ENUM_BUDGET)
    s.set_defaults(func=cmd_dual)

    s = graph_cmd("kempe", "Kempe graph of 3-edge-colourings of a cubic graph")
    s.set_defaults(func=cmd_kempe)

    s = sub.add_parser("census", help="run the reconfiguration census over a graph6 corpus")
    s.add_argument("--corpus", required=True, help="graph6 file or bundled name such as cubic_12")
    s.add_argument("--domains", default="4 z:4", help='space separated, e.g. "4 z:4 z:2,2"')
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", help="JSON-lines output path")
    s.add_argument("--min-edge-connectivity", type=int, default=3)
    s.add_argument("--any-degree", action="store_true", help="do not restrict to cubic graphs")
    s.add_argument("--diameter", action="store_true")
    s.add_argument("--budget", type=int, default=DEFAULT_ENUM_BUDGET)
    s.set_defaults(func=cmd_census)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (FlowReconfError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
