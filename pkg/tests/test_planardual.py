import itertools
import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.sparse.csgraph import breadth_first_order

from flowreconf import census
from flowreconf.errors import InvalidInput, PreconditionError
from flowreconf.flows import IntegerBand, enumerate_nz_flows, group_domain, verify_flow
from flowreconf.multigraph import is_cycle_edge_set
from flowreconf.planardual import (
    PlaneEmbedding,
    associated_coloring,
    build_dual,
    check_face_moves,
    coloring_from_flow,
    cube_embedding,
    dipole_embedding,
    embedding_from_json,
    embedding_from_rotation,
    fan_embedding,
    flow_path_via_duality,
    induced_flow,
    k4_embedding,
    load_embedding,
    recolor_graph,
    standard_embeddings,
    transfer_color_path,
)
from flowreconf.reconfig import build

Z4 = group_domain(4)
EMBS = standard_embeddings()


def test_embedding_validation():
    emb = k4_embedding()
    assert len(emb.faces) == 4
    with pytest.raises(InvalidInput):
        PlaneEmbedding(emb.graph, emb.faces[:-1])
    swapped = list(emb.faces)
    swapped[0] = tuple((e, "right" if s == "left" else "left") for e, s in swapped[0])
    with pytest.raises(InvalidInput):
        PlaneEmbedding(emb.graph, tuple(swapped))
    # K33 has no plane embedding, so any rotation fails the Euler check
    k33 = census.k33()
    with pytest.raises(InvalidInput):
        embedding_from_rotation(k33, [[e for e, _ in k33.incidence[v]] for v in range(k33.n)])


def test_dual_examples():
    d = build_dual(k4_embedding())
    assert d.graph.n == 4 and d.graph.m == 6 and d.graph.is_cubic() and not d.graph.has_parallel_edges()
    for m in range(2, 7):
        d = build_dual(dipole_embedding(m))
        assert d.graph.n == m and d.graph.m == m
        assert sorted(d.graph.degrees) == [2] * m and d.graph.is_connected()
    d = build_dual(cube_embedding())
    assert d.graph.n == 6 and d.graph.m == 12 and set(d.graph.degrees) == {4}


def test_bridge_dual_is_rejected():
    g = census.path(2)
    emb = embedding_from_rotation(g, [[0], [0]])
    with pytest.raises(PreconditionError):
        build_dual(emb)


def test_dual_orientation_convention():
    # the head of e* lies on the right of e: for a ccw triangle the inner face is on the left
    g = census.cycle(3)
    emb = embedding_from_rotation(g, [[0, 2], [1, 0], [2, 1]])
    inner = next(i for i, w in enumerate(emb.faces) if all(s == "left" for _, s in w))
    d = build_dual(emb)
    assert all(t == inner for t, _ in d.graph.arcs)


@pytest.mark.parametrize("name", sorted(EMBS))
def test_induced_flows_and_round_trip(name):
    emb = EMBS[name]
    d = build_dual(emb)
    rg = recolor_graph(d.graph, 4)
    got = {induced_flow(d, rg.coloring(i), Z4) for i in range(rg.n)}
    want = set(enumerate_nz_flows(emb.graph, Z4))
    assert got == want
    assert rg.n == 4 * len(want)
    for f in want:
        c = coloring_from_flow(d, f)
        assert induced_flow(d, c, Z4) == f
        shifted = coloring_from_flow(d, f, 0, 3)
        assert {(b - a) % 4 for a, b in zip(c, shifted)} == {3}
    k = IntegerBand(4)
    for f in enumerate_nz_flows(emb.graph, k):
        c = associated_coloring(d, f)
        assert set(c) <= {1, 2, 3, 4}
        h = induced_flow(d, c, k)
        assert all((a - b) % 4 == 0 for a, b in zip(f.values, h.values))


def test_coloring_examples():
    d = build_dual(dipole_embedding(4))
    two = recolor_graph(d.graph, 2, palette_start=1)
    assert two.n == 2
    f = induced_flow(d, two.coloring(0), IntegerBand(2))
    assert set(map(abs, f.values)) == {1}
    with pytest.raises(InvalidInput):
        induced_flow(d, (1, 1, 1, 1), IntegerBand(2))
    with pytest.raises(PreconditionError):
        coloring_from_flow(build_dual(k4_embedding()), enumerate_nz_flows(census.k4(), Z4)[0] - enumerate_nz_flows(census.k4(), Z4)[0])
    # already induced by a 1..k colouring: associated colouring reproduces it exactly
    d4 = build_dual(k4_embedding())
    f = induced_flow(d4, (1, 2, 3, 4), IntegerBand(4))
    assert induced_flow(d4, associated_coloring(d4, f), IntegerBand(4)) == f


def test_recolor_examples():
    assert recolor_graph(census.k4(), 4).n == 24
    assert recolor_graph(census.k4(), 4).edge_count == 0
    for m in range(3, 8):
        assert recolor_graph(census.cycle(m), 4).is_connected()
    for k in range(2, 6):
        r = recolor_graph(census.complete(k), k)
        assert r.n == math.factorial(k) and r.edge_count == 0


def test_transfer_examples():
    d = build_dual(k4_embedding())
    f = transfer_color_path(d, [], Z4, start=enumerate_nz_flows(census.k4(), Z4)[0])
    assert len(f) == 0
    dd = build_dual(dipole_embedding(3))
    p = transfer_color_path(dd, [(0, 1, 2), (0, 1, 3)], Z4)
    p.validate(dd.primal)
    (c, a), = p.moves
    assert c.edge_set == {e for e, _ in dd.embedding.faces[2]}
    with pytest.raises(InvalidInput):
        transfer_color_path(dd, [(0, 1, 2), (1, 2, 3)], Z4)


def _paths_from_root(rg, root):
    order, pred = breadth_first_order(rg.adjacency, root, directed=False)
    for v in order:
        path = [int(v)]
        while path[-1] != root:
            path.append(int(pred[path[-1]]))
        yield path[::-1]


@pytest.mark.parametrize("name", sorted(EMBS))
def test_every_color_path_transfers(name):
    emb = EMBS[name]
    d = build_dual(emb)
    for dom, start in ((Z4, 0), (IntegerBand(4), 1)):
        rg = recolor_graph(d.graph, 4, palette_start=start)
        fg = build(emb.graph, dom)
        for comp in rg.components()[:3]:
            for path in _paths_from_root(rg, comp[0]):
                cols = [rg.coloring(i) for i in path]
                p = transfer_color_path(d, cols, dom)
                p.validate(emb.graph)
                assert len(p) == len(path) - 1
                if dom is Z4:
                    assert fg.labels[fg.index_of(p.start)] == fg.labels[fg.index_of(p.end)]
        if rg.is_connected():
            assert fg.is_connected()


@pytest.mark.parametrize("name", sorted(EMBS))
def test_face_moves(name):
    assert check_face_moves(EMBS[name], Z4)


def test_flow_path_via_duality_lengths():
    for name in ("cube", "dipole4", "dipole6", "fan6"):
        emb = EMBS[name]
        d = build_dual(emb)
        fl = enumerate_nz_flows(emb.graph, Z4)
        for f1, f2 in itertools.islice(itertools.combinations(fl, 2), 40):
            p = flow_path_via_duality(emb, f1, f2)
            if p is None:
                continue
            p.validate(emb.graph)
            assert p.start == f1 and p.end == f2
        k4f = enumerate_nz_flows(emb.graph, IntegerBand(4))
        for f1, f2 in itertools.islice(itertools.combinations(k4f, 2), 20):
            p = flow_path_via_duality(emb, f1, f2)
            if p is None:
                continue
            p.validate(emb.graph)
            assert p.end == f2
            rgi = recolor_graph(d.graph, 4, palette_start=1)
            cpath = rgi.shortest_path(rgi.index_of(associated_coloring(d, f1)), rgi.index_of(associated_coloring(d, f2)))
            assert len(p) <= len(cpath) - 1 + 2 * emb.graph.m


def test_json_round_trip(tmp_path):
    emb = cube_embedding()
    path = tmp_path / "cube.json"
    path.write_text(json.dumps(emb.to_json()))
    assert load_embedding(path) == emb
    with pytest.raises(InvalidInput):
        embedding_from_json({"vertices": 2, "arcs": [[0, 1]]})


@given(st.integers(3, 9))
def test_fan_embeddings(n):
    emb = fan_embedding(n)
    d = build_dual(emb)
    assert d.graph.n == n - 1
    for i in range(len(emb.faces)):
        assert is_cycle_edge_set(emb.graph, emb.face_cycle(i).edges)


@given(st.integers(2, 6), st.data())
def test_dipole_face_moves_property(m, data):
    emb = dipole_embedding(m)
    d = build_dual(emb)
    rg = recolor_graph(d.graph, 4)
    i = data.draw(st.integers(0, rg.n - 1))
    for j in rg.neighbors_of(i):
        p = transfer_color_path(d, [rg.coloring(i), rg.coloring(j)], Z4)
        p.validate(emb.graph)
        diff = (p.end - p.start).support()
        face = next(x for x in range(m) if rg.coloring(i)[x] != rg.coloring(j)[x])
        assert diff == {e for e, _ in emb.faces[face]}
        assert verify_flow(emb.graph, p.end)
