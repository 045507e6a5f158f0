import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flowreconf import census
from flowreconf.errors import InvalidInput, PreconditionError
from flowreconf.flows import Flow, IntegerBand, add_cycle, cycle_flow, enumerate_nz_flows, group_domain, verify_flow
from flowreconf.multigraph import all_cycles
from flowreconf.pathbuild import (
    ReconfigPath,
    decompose_into_cycle_flows,
    escape_cycle,
    exchange_path,
    extend_second_support,
    extend_support,
    mod_zero_path,
    path_from_flows,
    product_path,
    short_cycle_bound,
    split_flow,
)
from flowreconf.reconfig import build, neighbors
from strategies import two_edge_connected_multigraphs

Z55 = group_domain(5, 5)
K4 = census.k4()


def _sum_moves(g, dom, moves):
    total = Flow(dom, (0,) * g.m)
    for c, a in moves:
        total = total + cycle_flow(g, dom, c, a)
    return total


@pytest.fixture(scope="module")
def k4_z55():
    return enumerate_nz_flows(K4, Z55)


def test_decompose_examples():
    z5 = group_domain(5)
    assert decompose_into_cycle_flows(K4, Flow(z5, (0,) * 6)) == []
    c = all_cycles(K4)[0]
    (c2, a), = decompose_into_cycle_flows(K4, cycle_flow(K4, z5, c, 3))
    assert c2.edge_set == c.edge_set
    for f in enumerate_nz_flows(K4, z5):
        moves = decompose_into_cycle_flows(K4, f)
        assert len(moves) <= 3 and _sum_moves(K4, z5, moves) == f
    with pytest.raises(InvalidInput):
        decompose_into_cycle_flows(census.path(3), Flow(z5, (1, 1)))


def test_extend_examples(k4_z55):
    # b zero exactly on edge 0 of a triangle
    f = next(f for f in k4_z55 if (split_flow(f)[1] == 0).sum() == 1 and split_flow(f)[1][0] == 0)
    g, (c, a) = extend_second_support(K4, f)
    assert len(c) == 3 and 0 in c.edge_set
    assert (split_flow(g)[1] != 0).sum() > (split_flow(f)[1] != 0).sum()
    assert (split_flow(g)[0] == split_flow(f)[0]).all()
    full = next(f for f in k4_z55 if (split_flow(f)[1] != 0).all())
    with pytest.raises(PreconditionError):
        extend_second_support(K4, full)


def test_extend_pigeonhole_boundary():
    # B = Z4 and a triangle already showing 1 and 2 in its direction: 3 must be chosen
    dom = group_domain(5, 4)
    c = next(c for c in all_cycles(K4) if len(c) == 3)
    (e0, _), (e1, s1), (e2, _) = c.entries
    assert e0 == 0
    vals = cycle_flow(K4, dom, c, 1 * 4 + 0).array()  # A part 1 along c, B part 0
    vals[e1] = (vals[e1] // 4) * 4 + (1 if s1 == 1 else 3)
    vals[e2] = (vals[e2] // 4) * 4 + 2
    f = Flow(dom, tuple(int(x) for x in vals))
    # not a flow, but extend only reads values on the cycle through the first zero edge
    nxt, (cyc, a) = extend_support(K4, f, 1)
    assert cyc.edge_set == c.edge_set
    assert a % 4 == (-3) % 4


def test_exchange_and_product(k4_z55):
    rnd = random.Random(0)
    ok = [f for f in k4_z55 if (split_flow(f)[1] != 0).all() and (split_flow(f)[0] != 0).all()]
    for _ in range(50):
        f1, f2 = rnd.sample(ok, 2)
        p = exchange_path(K4, f1, f2)
        p.validate(K4)
        assert p.end == f2 and len(p) <= 2 * K4.m
    assert len(exchange_path(K4, ok[0], ok[0])) == 0
    assert len(product_path(K4, ok[0], ok[0])) == 0
    for _ in range(50):
        f1, f2 = rnd.sample(k4_z55, 2)
        p = product_path(K4, f1, f2)
        p.validate(K4)
        assert p.start == f1 and p.end == f2 and len(p) <= 4 * K4.m


def test_product_hypothesis_check():
    g = census.cube()  # shortest cycles through edges have length 4
    assert short_cycle_bound(g) == 4
    f = enumerate_nz_flows(g, group_domain(4, 4), budget=1 << 22)[0]
    with pytest.raises(PreconditionError):
        product_path(g, f, f)


def test_mod_zero_examples():
    dom = IntegerBand(4)
    fl = enumerate_nz_flows(K4, dom)
    assert len(mod_zero_path(K4, fl[0], fl[0])) == 0
    for f in fl:
        for h in fl:
            if all((a - b) % 4 == 0 for a, b in zip(f.values, h.values)):
                p = mod_zero_path(K4, f, h)
                p.validate(K4)
                assert p.end == h and len(p) <= 6
    with pytest.raises(PreconditionError):
        mod_zero_path(K4, fl[0], next(h for h in fl if (h.values[0] - fl[0].values[0]) % 4))


def test_escape_examples():
    z4 = group_domain(4)
    for f in enumerate_nz_flows(K4, z4):
        c, a = escape_cycle(K4, f)
        assert len(c) == 4 and a == 2
    dom = IntegerBand(3)
    for f in enumerate_nz_flows(K4, dom):
        c, a = escape_cycle(K4, f)
        assert a == -3
        assert all(np.sign(f.values[e]) == s for e, s in c.entries)
    with pytest.raises(PreconditionError):
        escape_cycle(K4, enumerate_nz_flows(K4, group_domain(5))[0])
    with pytest.raises(PreconditionError):
        escape_cycle(K4, Flow(z4, (0,) * 6))


def test_reversed_and_path_from_flows():
    dom = group_domain(2, 2)
    r = build(K4, dom)
    seq = [r.flow(i) for i in r.shortest_path(0, 5)]
    p = path_from_flows(K4, seq)
    p.validate(K4)
    q = p.reversed()
    q.validate(K4)
    assert q.start == p.end and q.end == p.start
    with pytest.raises(InvalidInput):
        ReconfigPath([seq[0], seq[0]], [(all_cycles(K4)[0], 1)]).validate(K4)


def test_diameter_short_cycle_bound():
    # every edge of a 2-edge-connected graph of diameter D lies on a cycle of length <= 2D+1
    import networkx as nx

    for g in census.small_test_graphs(10):
        G = nx.MultiGraph(list(g.arcs))
        D = nx.diameter(G)
        assert short_cycle_bound(g) <= 2 * D + 1


@pytest.mark.parametrize("name", ["k4", "cube", "petersen", "wheel:5", "prism:3", "k33", "dipole:4"])
@pytest.mark.parametrize("domain", ["z:4", "z:2,2", "z:6", "z:7", "z:2,3", "2", "3", "4", "5"])
def test_escape_valid_everywhere(name, domain):
    from flowreconf.flows import parse_domain

    g = census.generate(name)
    dom = parse_domain(domain)
    r = build(g, dom)
    for i in range(r.n):
        f = r.flow(i)
        c, a = escape_cycle(g, f)
        h = add_cycle(f, c, a)
        assert h != f and h.is_nowhere_zero() and verify_flow(g, h)
        assert r.has_edge(i, r.index_of(h))


@given(two_edge_connected_multigraphs(max_vertices=7, max_edges=10), st.sampled_from([(5,), (4,), (2, 2), (3, 3)]))
def test_decomposition_property(g, moduli):
    dom = group_domain(*moduli)
    for f in enumerate_nz_flows(g, dom)[:30]:
        moves = decompose_into_cycle_flows(g, f)
        assert len(moves) <= g.m - g.n + 1
        assert _sum_moves(g, dom, moves) == f


@given(two_edge_connected_multigraphs(max_vertices=6, max_edges=9), st.sampled_from(["z:4", "z:2,2", "z:6", "3", "4"]))
def test_escape_property(g, domain):
    from flowreconf.flows import parse_domain

    dom = parse_domain(domain)
    for f in enumerate_nz_flows(g, dom)[:30]:
        c, a = escape_cycle(g, f)
        h = add_cycle(f, c, a)
        assert h in neighbors(g, f)


@given(two_edge_connected_multigraphs(max_vertices=7, max_edges=10), st.sampled_from([3, 4, 5]), st.data())
def test_mod_zero_property(g, k, data):
    fl = enumerate_nz_flows(g, IntegerBand(k))
    if not fl:
        return
    f = data.draw(st.sampled_from(fl))
    same = [h for h in fl if all((a - b) % k == 0 for a, b in zip(f.values, h.values))]
    h = data.draw(st.sampled_from(same))
    p = mod_zero_path(g, f, h)
    p.validate(g)
    assert p.end == h and len(p) <= g.m
