import io
import json
import random

import networkx as nx
import pytest

from flowreconf import census
from flowreconf.census import CensusFilters
from flowreconf.errors import InvalidInput
from flowreconf.flows import group_domain, verify_flow
from flowreconf.reconfig import build


def test_graph6_k4():
    g = census.parse_graph6("C~")
    assert g.n == 4 and g.m == 6 and g.is_cubic()
    assert census.write_graph6(g) == "C~"


def test_graph6_header_prefix():
    assert census.parse_graph6(">>graph6<<C~").m == 6


@pytest.mark.parametrize("n", [4, 6, 8, 10, 12])
def test_graph6_round_trip_corpus(n):
    for line in census.cubic_corpus(n):
        assert census.write_graph6(census.parse_graph6(line)) == line


def test_graph6_against_networkx():
    for line in census.cubic_corpus(10)[:10]:
        g = census.parse_graph6(line)
        ref = nx.from_graph6_bytes(line.encode())
        assert sorted(map(tuple, map(sorted, ref.edges()))) == sorted(g.arcs)


@pytest.mark.parametrize("bad", ["", "C", "C~~", "C\x7f", "C ~", "~?"])
def test_graph6_malformed(bad):
    with pytest.raises(InvalidInput):
        census.parse_graph6(bad)


def test_graph6_padding_bits():
    # K2 needs one bit; a set padding bit is invalid
    assert census.parse_graph6("A_").m == 1
    with pytest.raises(InvalidInput):
        census.parse_graph6("A`")


def test_write_graph6_rejects_multigraph():
    with pytest.raises(InvalidInput):
        census.write_graph6(census.dipole(3))


def test_generators():
    g = census.moebius_ladder(6)
    assert (g.n, g.m) == (12, 18) and g.is_cubic()
    assert census.klee([0]).n == 6 and census.klee([0]).is_cubic()
    assert census.klee([0, 1, 2]).n == 10
    d = census.dipole(4)
    assert (d.n, d.m) == (2, 4)
    assert (census.petersen().n, census.petersen().m) == (10, 15)
    assert census.cube().is_cubic() and census.k33().is_cubic()
    assert census.prism(3).n == 6
    w = census.wheel(5)
    assert (w.n, w.m) == (6, 10)


def test_generate_spec_strings():
    assert census.generate("moebius:4").n == 8
    assert census.generate("klee:0,1").n == 8
    assert census.generate("K4").m == 6
    with pytest.raises(InvalidInput):
        census.generate("nosuch")
    with pytest.raises(InvalidInput):
        census.generate("dipole:x")


def test_corpus_sanity_counts():
    lines = [ln for n in range(4, 16, 2) for ln in census.cubic_corpus(n)]
    assert census.corpus_sanity(lines) == {4: 1, 6: 2, 8: 5, 10: 19, 12: 85, 14: 509}


def test_corpus_sanity_skips_malformed():
    assert census.corpus_sanity(["C~", "garbage!", "C"]) == {4: 1}


def test_small_test_graphs_are_2_edge_connected():
    gs = census.small_test_graphs(8)
    assert gs
    for g in gs:
        assert g.n <= 8 and g.is_connected()
        assert census.is_k_edge_connected(g, 2)


def test_run_census_order_and_jobs_independent():
    corpus = census.cubic_corpus(10)
    shuffled = corpus[:]
    random.Random(3).shuffle(shuffled)
    a = census.run_census(corpus, ["4", "z:4"])
    b = census.run_census(shuffled, ["4", "z:4"], jobs=2)
    assert [r.to_json() for r in a] == [r.to_json() for r in b]
    assert [r.graph for r in a] == sorted(corpus)


def test_census_filters():
    recs = census.run_census(census.cubic_corpus(10), ["z:4"])
    ok = [r for r in recs if not r.skipped]
    skipped = [r for r in recs if r.skipped]
    assert len(ok) + len(skipped) == 19
    for r in skipped:
        assert "edge-connected" in r.skipped
    recs2 = census.run_census(census.cubic_corpus(10), ["z:4"], CensusFilters(min_edge_connectivity=2))
    assert sum(not r.skipped for r in recs2) >= len(ok)


def test_census_malformed_line_is_recorded():
    recs = census.run_census(["C~", "C"], ["z:4"])
    bad = [r for r in recs if r.skipped]
    assert len(bad) == 1 and bad[0].skipped.startswith("malformed")


def test_census_budget_error_recorded():
    recs = census.run_census(["C~"], ["z:4"], budget=1)
    assert recs[0].errors


def test_census_records_reproducible():
    for r in census.run_census(census.cubic_corpus(8), ["z:4", "4"]):
        if r.skipped:
            continue
        g = census.parse_graph6(r.graph)
        for d, st in r.stats.items():
            rg = build(g, census.parse_domain(d))
            assert st["flow_count"] == rg.n
            assert st["component_sizes"] == rg.component_sizes()


def test_z4_and_klein_flow_counts_agree():
    # the number of nowhere-zero A-flows depends only on |A|
    for r in census.run_census(census.cubic_corpus(10), ["z:4", "z:2,2"]):
        if not r.skipped:
            assert r.stats["z:4"]["flow_count"] == r.stats["z:2,2"]["flow_count"]


def test_jsonl_round_trip():
    recs = census.run_census(census.cubic_corpus(8), ["z:4"], diameter=True)
    summary = census.summarize(recs, ["z:4"])
    buf = io.StringIO()
    census.write_jsonl(recs, summary, buf)
    buf.seek(0)
    rows = list(census.iter_jsonl(buf))
    # histogram keys become strings in JSON
    assert rows[-1] == json.loads(json.dumps({"summary": summary}))
    assert rows[:-1] == [r.to_json() for r in recs]


def test_summary_fields():
    recs = census.run_census(census.cubic_corpus(8), ["4", "z:4"])
    s = census.summarize(recs, ["4", "z:4"])
    assert s["graphs"] == 5
    assert set(s["domains"]) == {"4", "z:4"}
    assert 0 <= s["all_connected"] <= s["analysed"]


def test_find_low_degree_flows_none_small():
    assert census.find_low_degree_flows(census.cubic_corpus(8), "z:5") == []


def test_find_low_degree_flows_reports_valid_flow():
    hits = census.find_low_degree_flows(census.cubic_corpus(8), "z:4", max_degree=10)
    assert hits
    for line, f, deg in hits:
        g = census.parse_graph6(line)
        assert verify_flow(g, f) and f.is_nowhere_zero()
        assert deg <= 10
        assert f.domain == group_domain(4)
