import json

import numpy as np
import pytest

from morphqec.colex import (
    BLUE,
    BUILTIN_BALLS,
    GREEN,
    RED,
    Colex,
    ColexError,
    ball,
    ball_code,
    canonical_ball_code,
    color_code,
    cone,
    default_hubs,
    hyperoctahedron_colex,
    qrm_colex,
    triangular_torus,
)


@pytest.mark.parametrize("L", [6, 9, 12])
def test_torus_counts(L):
    cx = triangular_torus(L)
    assert cx.n_vertices == L * L
    assert len(cx.facets) == 2 * L * L
    assert len(cx.simplices[1]) == 3 * L * L
    assert all(len(cx.facet_star((v,))) == 6 for v in range(cx.n_vertices))
    cx.validate()


def test_torus_rejects_bad_size():
    with pytest.raises(ColexError):
        triangular_torus(7)
    with pytest.raises(ColexError):
        triangular_torus(3)


def test_torus_code_parameters():
    code = color_code(triangular_torus(6))
    assert code.params == (72, 4)


def test_colors_proper():
    for cx in (triangular_torus(9), qrm_colex(3), hyperoctahedron_colex(4)):
        for f in cx.facets:
            assert sorted(cx.color[v] for v in f) == list(range(1, cx.d + 2))


def test_star_queries():
    cx = triangular_torus(6)
    e = cx.simplices[1][0]
    assert len(cx.facet_star(e)) == 2
    assert cx.join((e[0],), (e[1],)) == e
    assert all(e[0] in s for s in cx.star((e[0],), 2))


def test_ball_of_torus_vertex():
    cx = triangular_torus(6)
    b = ball(cx, 0)
    assert len(b.members[2]) == 6 and len(b.members[1]) == 6
    assert len(b.boundary_vertices(None, cx)) == 6
    code = ball_code(cx, b)
    assert code.params == (6, 4)


def test_boundary_ball_rejected():
    cx = qrm_colex(2)
    with pytest.raises(ColexError):
        ball(cx, 0)


def test_qrm_colex_center_ball():
    for d in (2, 3):
        cx = qrm_colex(d)
        b = ball(cx, d + 1)
        assert len(b.facet_ids) == 2 ** d
        assert color_code(cx).params == (2 ** (d + 1) - 1, 1)


@pytest.mark.parametrize("name", sorted(BUILTIN_BALLS))
def test_builtin_balls_closed_interior(name):
    cx = BUILTIN_BALLS[name]()
    cx.validate()
    v = 0 if name == "hyperoct3" else cx.n_vertices - 1
    b = ball(cx, v)
    assert len(b.facet_ids) == len(cx.facets)


def test_cone_center_last():
    hexa = cone([(i, (i + 1) % 6) for i in range(6)], [3, 2, 3, 2, 3, 2], 1)
    assert hexa.n_vertices == 7 and hexa.color[6] == 1
    assert ball_code(hexa, ball(hexa, 6)).params == (6, 4)


def test_dual_bipartition_is_proper():
    for cx in (qrm_colex(2), qrm_colex(3), triangular_torus(6)):
        side = cx.dual_bipartition()
        d = cx.d
        for s in cx.simplices[d - 1]:
            st = cx.facet_star(s)
            if len(st) == 2:
                assert side[st[0]] != side[st[1]]


def test_default_hubs_translation_invariant():
    L = 9
    cx = triangular_torus(L)
    base = default_hubs(cx, ball(cx, 0))
    offs = {c: cx.displacement(0, u) for c, u in base.items()}
    for v in (3 * L + 3, 6 * L + 3):
        hubs = default_hubs(cx, ball(cx, v))
        assert {c: cx.displacement(v, u) for c, u in hubs.items()} == offs


def test_canonical_ball_code_logicals():
    cx = triangular_torus(6)
    code, edges = canonical_ball_code(cx, ball(cx, 0))
    code.validate()
    assert len(edges) == code.k == 4
    assert {c for c, _, _ in edges} == {RED, GREEN, BLUE} - {cx.color[0]}


def test_json_roundtrip():
    cx = triangular_torus(6)
    back = Colex.from_json(json.loads(json.dumps(cx.to_json())))
    assert back.facets == cx.facets and back.color == cx.color
