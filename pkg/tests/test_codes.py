import pytest

from morphqec.codes import (
    CodeValidationError,
    CssCode,
    EnumerationGuardError,
    brute_force_distance,
    build,
    count_weight2_logical_z,
    extract_logicals,
    four_two_two,
    hyperoctahedron,
    qrm,
    steane,
    trivial_code,
)
from morphqec.colex import ball, hyperoctahedron_colex
from morphqec.pauli import PauliOperator, StabilizerMatrix, symplectic_product


def test_four_two_two_logicals():
    code = four_two_two()
    assert code.k == 2
    assert all(op.weight == 2 for op in code.logical_x + code.logical_z)
    code.validate()


def test_trivial_code():
    code = trivial_code(1)
    assert code.logical_x[0].to_string() == "X"
    assert code.logical_z[0].to_string() == "Z"


def test_steane_min_representative_weight_three():
    code = steane()
    lz = code.logical_z[0]
    stabs = [r.z for r in code.z_stabs]
    weights = []
    for mask in range(1 << len(stabs)):
        v = lz.z
        for i, s in enumerate(stabs):
            if (mask >> i) & 1:
                v ^= s
        weights.append(bin(v).count("1"))
    assert min(weights) == 3


def test_non_commuting_checks_rejected():
    xs = StabilizerMatrix.from_strings(["XII"])
    zs = StabilizerMatrix.from_strings(["ZZI"])
    with pytest.raises(CodeValidationError):
        extract_logicals(xs, zs)


@pytest.mark.parametrize(
    "code,params,dist",
    [(steane(), (7, 1), 3), (four_two_two(), (4, 2), 2), (qrm(2), (7, 1), 3), (qrm(3), (15, 1), 3),
     (hyperoctahedron(2), (4, 2), 2), (hyperoctahedron(3), (8, 3), 2), (hyperoctahedron(4), (16, 4), 2)],
)
def test_catalog_parameters(code, params, dist):
    code.validate()
    assert code.params == params
    assert brute_force_distance(code) == dist


def test_pairing_matrix_exhaustive():
    for code in (qrm(3), hyperoctahedron(4), four_two_two()):
        for i, lx in enumerate(code.logical_x):
            for j, lz in enumerate(code.logical_z):
                assert symplectic_product(lx, lz) == (i == j)


def test_hyperoctahedron_matches_lemma():
    for d in range(2, 7):
        cx = hyperoctahedron_colex(d)
        b = ball(cx, 0)
        code = hyperoctahedron(d)
        assert code.n == len(b.members[d]) == 2 ** d
        assert code.k == len(b.members[1]) - d == d


def test_guards():
    with pytest.raises(ValueError):
        qrm(4)
    with pytest.raises(ValueError):
        hyperoctahedron(7)
    with pytest.raises(EnumerationGuardError):
        brute_force_distance(hyperoctahedron(5))


def test_weight2_steane_zero():
    assert count_weight2_logical_z(steane()) == 0


def test_json_roundtrip(tmp_path):
    code = qrm(3)
    back = CssCode.from_json(code.to_json())
    assert back.params == code.params
    assert back.logical_x == code.logical_x
    back.validate()


def test_build_names():
    assert build("steane").params == (7, 1)
    assert build("hyperoct", 3).params == (8, 3)
    with pytest.raises(ValueError):
        build("nope")
