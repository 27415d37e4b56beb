import json

import numpy as np
import pytest

from morphqec.colex import ColexError, ball, color_code, qrm_colex, triangular_torus
from morphqec.hct import (
    METHODS,
    HctLattice,
    NotFullyMorphed,
    OverlapError,
    generate_hct,
    restricted_lattice,
    split_into_toric_copies,
    toric_structure,
)


@pytest.fixture(scope="module")
def torus6():
    return triangular_torus(6)


def test_unmorphed_is_color_code(torus6):
    lat = HctLattice(torus6)
    assert lat.code.params == color_code(torus6).params
    assert lat.n == len(torus6.facets)


def test_single_morph_counts(torus6):
    lat = HctLattice(torus6).with_morph(0)
    # six faces removed, four cc-edges added
    assert lat.n == 72 - 6 + 4
    assert lat.code.k == 4
    lat.code.validate()
    assert 0 not in lat.x_checks


def test_overlap_rejected(torus6):
    lat = HctLattice(torus6).with_morph(0)
    nb = torus6.neighbors[0][0]
    with pytest.raises(OverlapError):
        lat.with_morph(nb)


def test_bad_hub_rejected(torus6):
    with pytest.raises(ColexError):
        HctLattice(torus6).with_morph(0, {2: 0, 3: 0})


@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("q", [0.0, 0.5, 1.0])
def test_generated_lattices_valid(torus6, method, q):
    lat = generate_hct(torus6, method, q, 7)
    code = lat.code
    code.validate()
    assert code.k == 4
    if q == 0:
        assert not lat.records
    if method in ("A1", "A2"):
        assert all(torus6.color[r.center] == 1 for r in lat.records)


def test_generation_deterministic(torus6):
    a = generate_hct(torus6, "C", 0.5, 11)
    b = generate_hct(torus6, "C", 0.5, 11)
    assert a.records == b.records


def test_generation_errors(torus6):
    with pytest.raises(ValueError):
        generate_hct(torus6, "Z", 0.5)
    with pytest.raises(ValueError):
        generate_hct(torus6, "A1", 1.5)
    with pytest.raises(ColexError):
        generate_hct(qrm_colex(2), "A1", 0.5)


def test_a1_full_morph_covers_all_facets(torus6):
    lat = generate_hct(torus6, "A1", 1.0, 0)
    assert lat.n_facet_qubits == 0
    assert len(lat.records) == 12


@pytest.mark.parametrize("L", [6, 12])
def test_toric_limit(L):
    lat = generate_hct(triangular_torus(L), "A1", 1.0, 0)
    copies = split_into_toric_copies(lat)
    assert len(copies) == 2
    for c in copies:
        st = toric_structure(c)
        assert c.k == 2 and c.n == 2 * L * L // 3
        assert st["square"] and st["euler"] == 0


def test_split_requires_full_morph(torus6):
    with pytest.raises(NotFullyMorphed):
        split_into_toric_copies(generate_hct(torus6, "A1", 0.5, 0))


def test_restricted_lattice_excludes_centers(torus6):
    lat = generate_hct(torus6, "C", 0.6, 2)
    for pair in ((1, 2), (1, 3)):
        rl = restricted_lattice(lat, pair)
        assert not set(rl.vertices) & lat.morphed_centers
        for a, b, q in rl.edges:
            assert {torus6.color[a], torus6.color[b]} <= set(pair)
            if q >= 0:
                assert lat.qubit_vertices(q) in ((a, b), (b, a))


def test_z_checks_commute_with_x_checks(torus6):
    lat = generate_hct(torus6, "B", 0.7, 4)
    for xs in lat.x_checks.values():
        for zs in lat.z_checks.values():
            assert len(set(xs) & set(zs)) % 2 == 0


def test_json_roundtrip(torus6):
    lat = generate_hct(torus6, "C", 0.6, 9)
    back = HctLattice.from_json(json.loads(json.dumps(lat.to_json())))
    assert back.records == lat.records
    assert back.qubits == lat.qubits
