import json

import numpy as np
import pytest

from morphqec.codes import brute_force_distance, four_two_two, hyperoctahedron, qrm, steane
from morphqec.colex import ball, canonical_ball_code, color_code, qrm_colex, triangular_torus
from morphqec.hct import HctLattice, generate_hct, make_record
from morphqec.morph import (
    MorphError,
    MorphSpec,
    find_relabeling,
    load_morph_result,
    morph,
    parameter_delta,
    restrict_stabilizer,
)
from morphqec.pauli import rref


def same_rowspace(a, b):
    ra, rb = rref(list(a))[0], rref(list(b))[0]
    return sorted(ra) == sorted(rb)


def qrm3_morph(hubs=None, basis="canonical", seed=None):
    cx = qrm_colex(3)
    b = ball(cx, 4)
    if basis == "canonical":
        cc, _ = canonical_ball_code(cx, b, hubs)
        spec = MorphSpec.build(color_code(cx), b.facet_ids, cc.logical_x)
    else:
        spec = MorphSpec.build(color_code(cx), b.facet_ids, basis="random", seed=seed)
    return spec, morph(spec)


def test_restrict_full_subgroup_steane():
    child = restrict_stabilizer(steane(), [0, 1, 2, 3])
    assert child.n == 4
    assert child.k == 4 - child.rank_x - child.rank_z


def test_restrict_bad_region():
    with pytest.raises(MorphError):
        restrict_stabilizer(steane(), [0, 9])


def test_empty_region_is_identity():
    code = qrm(3)
    res = morph(MorphSpec.build(code, []))
    assert res.morphed is code
    assert res.qubit_map == tuple(("parent", q) for q in range(15))


def test_full_region_gives_trivial_code():
    code = steane()
    res = morph(MorphSpec.build(code, range(7)))
    m = res.morphed
    assert m.params == (1, 1)
    assert m.x_stabs.rows == () and m.z_stabs.rows == ()


def random_parents():
    return [steane(), qrm(3), four_two_two(), hyperoctahedron(4), color_code(triangular_torus(6))]


def test_k_preserved_randomized(rng):
    parents = random_parents()
    for t in range(200):
        p = parents[t % len(parents)]
        size = int(rng.integers(0, p.n + 1))
        region = sorted(rng.choice(p.n, size, replace=False).tolist())
        res = morph(MorphSpec.build(p, region, basis="random", seed=t))
        m = res.morphed
        m.validate()
        assert m.k == p.k
        assert m.n == p.n - len(region) + MorphSpec.build(p, region).child.k


def test_qrm3_parameters_and_map():
    spec, res = qrm3_morph()
    assert spec.child.params == (8, 3)
    assert res.morphed.params == (10, 1)
    assert brute_force_distance(res.morphed) == 2
    assert [k for k, _ in res.qubit_map] == ["parent"] * 7 + ["child"] * 3


def test_random_child_basis_same_parameters():
    outs = set()
    for s in range(5):
        _, res = qrm3_morph(basis="random", seed=s)
        outs.add((res.morphed.params, brute_force_distance(res.morphed)))
    assert outs == {((10, 1), 2)}


def test_hub_choices_all_agree():
    cx = qrm_colex(3)
    b = ball(cx, 4)
    colors = sorted({cx.color[v] for v in b.boundary_vertices(None, cx)})
    base = None
    for c0 in b.boundary_vertices(colors[0], cx):
        for c1 in b.boundary_vertices(colors[1], cx):
            for c2 in b.boundary_vertices(colors[2], cx):
                hubs = {colors[0]: c0, colors[1]: c1, colors[2]: c2}
                _, res = qrm3_morph(hubs)
                m = res.morphed
                # stabilizers acting only on surviving qubits do not depend on the basis
                old = [r.x for r in m.x_stabs if r.x < (1 << 7)]
                key = (m.params, brute_force_distance(m), tuple(sorted(rref(old)[0])))
                base = base or key
                assert key == base


def test_parameter_delta_qrm3():
    cx = qrm_colex(3)
    N, K, Dlb = parameter_delta((15, 1, 3), cx, ball(cx, 4))
    assert (N, K) == (10, 1)
    assert Dlb == 0  # every ball edge lies in 4 tetrahedra


def test_relabeling_steane():
    res = morph(MorphSpec.build(steane(), [0, 1, 2, 3]))
    m = res.morphed
    assert find_relabeling(m, [r.x for r in m.x_stabs], [r.z for r in m.z_stabs], m.n - 2) is not None


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_sequential_algebraic_matches_geometric(seed):
    cx = triangular_torus(6)
    lat = generate_hct(cx, "A2", 0.8, seed)
    assert len(lat.records) >= 2
    code = color_code(cx)
    current = list(range(len(cx.facets)))  # current position -> facet id or edge label
    for rec in lat.records:
        b = ball(cx, rec.center)
        cc, edges = canonical_ball_code(cx, b, dict(rec.hubs))
        assert tuple(edges) == rec.edges
        region = [current.index(fi) for fi in sorted(b.facet_ids)]
        res = morph(MorphSpec.build(code, region, cc.logical_x))
        code = res.morphed
        current = [current[q] for k, q in res.qubit_map if k == "parent"] + [
            ("e", rec.center, e) for e in edges
        ]
    geo = lat.code
    assert code.n == geo.n
    assert same_rowspace(code.x_stabs.x_masks(), geo.x_stabs.x_masks())
    assert same_rowspace(code.z_stabs.z_masks(), geo.z_stabs.z_masks())
    assert code.k == geo.k == 4


def test_result_json_roundtrip(tmp_path):
    _, res = qrm3_morph()
    path = tmp_path / "m.json"
    path.write_text(json.dumps(res.to_json()))
    back = load_morph_result(path)
    assert back.qubit_map == res.qubit_map
    assert back.morphed.params == (10, 1)
