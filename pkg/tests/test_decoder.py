import itertools

import numpy as np
import pymatching
import pytest

from morphqec.colex import RED, triangular_torus
from morphqec.decoder import PAIRS, Decoder, Matching, ParityError, exhaustive_pairing_weight
from morphqec.hct import HctLattice, generate_hct, split_into_toric_copies


@pytest.fixture(scope="module")
def torus6():
    return triangular_torus(6)


@pytest.fixture(scope="module")
def torus12():
    return triangular_torus(12)


def lattices(cx, seed=0):
    return [generate_hct(cx, m, q, seed + i) for i, (m, q) in
            enumerate(itertools.product(("A1", "A2", "B", "C"), (0.0, 0.3, 0.6, 1.0)))]


def test_syndrome_examples(torus6):
    d = Decoder(generate_hct(torus6, "B", 0.5, 3))
    lat = d.lattice
    assert d.syndrome_of([]) == frozenset()
    fq = lat.facet_qubit[next(iter(lat.facet_qubit))]
    assert len(d.syndrome_of([fq])) == 3
    q, _, _, h, x = lat.cc_edges[0]
    assert d.syndrome_of([q]) == {h, x}


def test_match_examples(torus6):
    d = Decoder(HctLattice(torus6))
    rl = d.restricted[(1, 2)]
    a, b, _ = rl.edges[0]
    m = d.match({a, b}, (1, 2))
    assert m.edges == {0}
    assert d.match(set(), (1, 2)).edges == frozenset()
    with pytest.raises(ParityError):
        d.match({a}, (1, 2))


def test_exhaustive_pairing_small():
    pos = {0: 0, 1: 1, 2: 5, 3: 7}
    dist = lambda a, b: abs(pos[a] - pos[b])  # noqa: E731
    assert exhaustive_pairing_weight([0, 1, 2, 3], dist) == 1 + 2


@pytest.mark.parametrize("backend", ["pymatching", "networkx"])
def test_matching_is_optimal(torus6, rng, backend):
    for lat in lattices(torus6)[::3]:
        d = Decoder(lat, backend)
        for _ in range(5):
            err = np.nonzero(rng.random(lat.n) < 0.06)[0].tolist()
            syn = d.syndrome_of(err)
            for pair in PAIRS:
                defects = d.restricted_syndrome(syn, pair)
                if not 0 < len(defects) <= 10:
                    continue
                dist = {v: d._bfs(d.restricted[pair], v)[0] for v in defects}
                best = exhaustive_pairing_weight(defects, lambda a, b: dist[a][b])
                assert sum(dist[a][b] for a, b in d.match_pairs(syn, pair)) == best
                assert d.match(syn, pair).boundary(d.restricted[pair]) == set(defects)


def test_local_modify_noop_without_rr_edges(torus6, rng):
    d = Decoder(generate_hct(torus6, "A2", 0.7, 1))
    for _ in range(20):
        syn = d.syndrome_of(np.nonzero(rng.random(d.lattice.n) < 0.1)[0].tolist())
        for pair in PAIRS:
            m = d.match(syn, pair)
            assert d.local_modify(m) == m


def test_local_modify_rewrites_and_preserves_boundary(torus12, rng):
    d = Decoder(generate_hct(torus12, "B", 0.6, 5))
    rewrites = 0
    for _ in range(200):
        syn = d.syndrome_of(np.nonzero(rng.random(d.lattice.n) < 0.1)[0].tolist())
        for pair in PAIRS:
            m = d.match(syn, pair)
            mm = d.local_modify(m)
            rl = d.restricted[pair]
            assert mm.boundary(rl) == m.boundary(rl)
            rewrites += mm != m
    assert rewrites > 0


def test_local_lift_at_examples(torus6):
    d = Decoder(HctLattice(torus6))
    cx = torus6
    w = next(v for v in range(cx.n_vertices) if cx.color[v] == RED)
    assert d.local_lift_at(w, []) == ()
    fi = cx.facet_star((w,))[0]
    u1, u2 = [u for u in cx.facets[fi] if u != w]
    edges = [tuple(sorted((w, u1))), tuple(sorted((w, u2)))]
    assert d.local_lift_at(w, edges) == (fi,)
    # two same-color neighbours two steps apart around w: the two faces between them
    g = sorted(u for u in cx.neighbors[w] if cx.color[u] == cx.color[u1])
    for a, b in itertools.combinations(g, 2):
        faces = d.local_lift_at(w, [tuple(sorted((w, a))), tuple(sorted((w, b)))])
        assert len(faces) == 2
        mid = set(cx.facets[faces[0]]) & set(cx.facets[faces[1]])
        assert len(mid) == 2 and w in mid


def test_face_map_of_morphed_ball(torus6):
    lat = generate_hct(torus6, "A1", 0.0, 0).with_morph(0)
    d = Decoder(lat)
    for fi in lat.records[0].facet_ids:
        qs = d._face_map[fi]
        assert all(lat.cc_edges[q - lat.n_facet_qubits][4] in torus6.facets[fi] for q in qs)


def restriction_oracle(d, syndrome):
    """Plain restriction decoder: same matchings, lifted by brute force per red vertex."""
    cx = d.colex
    img = set()
    for pair in PAIRS:
        for ei in d.match(syndrome, pair).edges:
            a, b, _ = d.restricted[pair].edges[ei]
            img ^= {(a, b)}
    faces = set()
    for w in sorted({u for e in img for u in e if cx.color[u] == RED}):
        want = {e for e in img if w in e}
        star = sorted(cx.facet_star((w,)))
        found = None
        for size in range(len(star) + 1):
            for sub in itertools.combinations(star, size):
                got = set()
                for fi in sub:
                    for u in cx.facets[fi]:
                        if u != w:
                            got ^= {tuple(sorted((w, u)))}
                if got == want:
                    found = sub
                    break
            if found is not None:
                break
        faces ^= set(found)
    return {d.lattice.facet_qubit[fi] for fi in faces}


def test_q0_equals_restriction_decoder(torus12, rng):
    d = Decoder(generate_hct(torus12, "C", 0.0, 0))
    assert not d.lattice.records
    for _ in range(50):
        err = np.nonzero(rng.random(d.lattice.n) < 0.05)[0].tolist()
        syn = d.syndrome_of(err)
        assert d.decode(syn) == restriction_oracle(d, syn)


def test_q1_equals_toric_mwpm(torus12, rng):
    lat = generate_hct(torus12, "A1", 1.0, 0)
    d = Decoder(lat)
    copies = split_into_toric_copies(lat)
    colors = sorted({c for _, _, c, _, _ in lat.cc_edges})
    groups = {c: [q for q, _, cc, _, _ in lat.cc_edges if cc == c] for c in colors}
    for _ in range(30):
        err = np.nonzero(rng.random(lat.n) < 0.06)[0].tolist()
        corr = d.decode(d.syndrome_of(err))
        for c, code in zip(colors, copies):
            H = np.zeros((len(code.x_stabs), code.n), dtype=np.uint8)
            for i, r in enumerate(code.x_stabs):
                H[i, r.support] = 1
            local = np.zeros(code.n, dtype=np.uint8)
            pos = {q: i for i, q in enumerate(groups[c])}
            for q in err:
                if q in pos:
                    local[pos[q]] = 1
            ref = pymatching.Matching(H).decode((H @ local) % 2)
            ours = [q for q in corr if q in pos]
            assert len(ours) == int(ref.sum())


def test_single_qubit_errors_corrected(torus12):
    for i, lat in enumerate(lattices(torus12, seed=11)[::2]):
        d = Decoder(lat)
        for q in range(lat.n):
            assert d.judge([q], d.decode(d.syndrome_of([q])))


def test_decode_consistency(torus6, rng):
    for lat in lattices(torus6):
        d = Decoder(lat)
        for _ in range(20):
            err = np.nonzero(rng.random(lat.n) < rng.uniform(0, 0.15))[0].tolist()
            syn = d.syndrome_of(err)
            assert d.syndrome_of(d.decode(syn)) == syn


def test_judge_examples(torus6):
    lat = generate_hct(torus6, "B", 0.4, 2)
    d = Decoder(lat)
    err = [0, 5, lat.n - 1]
    assert d.judge(err, err)
    stab = set(lat.code.z_stabs[0].support)
    assert d.judge(err, set(err) ^ stab)
    lz = set(lat.code.logical_z[0].support)
    assert not d.judge(err, set(err) ^ lz)
    with pytest.raises(ValueError):
        d.judge(err, [])


def test_fast_path_matches_reference(torus12, rng):
    # the batch path and the reference path run the same exact matcher; on ties
    # between equal-weight paths they may pick different homology classes
    differ = total = 0
    for lat in lattices(torus12, seed=3)[::3]:
        d = Decoder(lat)
        errors = (rng.random((150, lat.n)) < 0.07).astype(np.uint8)
        fast = d.failures(errors)
        for shot in range(len(errors)):
            err = np.nonzero(errors[shot])[0].tolist()
            syn = d.syndrome_of(err)
            corr = d.decode(syn)
            assert d.correction_class(syn) == d.logical_class(corr)
            for pair in PAIRS:
                rl = d.restricted[pair]
                m = d._pm_matching(rl)
                det = np.zeros(m.num_detectors, dtype=np.uint8)
                for v in d.restricted_syndrome(syn, pair):
                    det[rl.vertex_index[v]] = 1
                _, w = m.decode(det, return_weight=True)
                assert w == sum(d.distance(pair, a, b) for a, b in d.match_pairs(syn, pair))
            differ += fast[shot] != (not d.judge(err, corr))
            total += 1
    assert differ <= 0.01 * total


def test_fast_path_exact_without_morphs(torus12, rng):
    d = Decoder(generate_hct(torus12, "C", 0.0, 0))
    errors = (rng.random((200, d.lattice.n)) < 0.07).astype(np.uint8)
    fast = d.failures(errors)
    for shot in range(len(errors)):
        err = np.nonzero(errors[shot])[0].tolist()
        assert fast[shot] == (not d.judge(err, d.decode(d.syndrome_of(err))))


def test_monotone_failure_rate(torus12):
    d = Decoder(generate_hct(torus12, "C", 0.6, 0))
    lo = d.sample_failures(0.02, 2000, np.random.default_rng(0))
    hi = d.sample_failures(0.12, 2000, np.random.default_rng(1))
    assert lo < hi
    assert d.sample_failures(0.0, 100, np.random.default_rng(0)) == 0


def test_backend_validation(torus6):
    with pytest.raises(ValueError):
        Decoder(HctLattice(torus6), "bogus")


def test_role_swap_x_decoding(torus6, rng):
    lat = HctLattice(torus6)
    d = Decoder(lat)
    zc = lat.z_checks
    for _ in range(20):
        err = set(np.nonzero(rng.random(lat.n) < 0.05)[0].tolist())
        syn = {mu for mu, sup in zc.items() if len(err & set(sup)) % 2}
        corr = d.decode_x(syn)
        assert {mu for mu, sup in zc.items() if len(corr & set(sup)) % 2} == syn
    with pytest.raises(NotImplementedError):
        Decoder(lat.with_morph(0)).decode_x(set())
