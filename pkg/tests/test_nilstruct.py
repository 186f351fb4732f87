import pytest

from walgebra.exceptions import CertificateError, GradingError, Sl2Error
from walgebra.services import nilstruct, orbits
from walgebra.services.catalog import lookup
from walgebra.services.liealg import vadd, vscale
from walgebra.services.symcore import ONE, rat


def complete(series, rank, label="a0"):
    orbit = lookup(series, rank, label)
    realization = orbits.realize(orbit)
    data = nilstruct.sl2_complete(realization.algebra, realization.L1, realization.h, realization.f)
    realization.algebra.normalize_form(data.L1, data.f)
    return orbit, realization, data


@pytest.fixture(scope="module")
def sl3():
    return complete("A", 2)


@pytest.fixture(scope="module")
def sl3_cartan(sl3):
    orbit, _, data = sl3
    cartan = nilstruct.opposite_cartan(data, orbit)
    modules = nilstruct.module_decomposition(data, orbit, cartan)
    return cartan, modules


def test_triple_relations(sl3):
    _, _, data = sl3
    algebra = data.algebra
    assert algebra.bracket(data.h, data.L1) == data.L1
    assert algebra.bracket(data.h, data.f) == vscale(data.f, -1)
    assert algebra.bracket(data.L1, data.f) == vscale(data.h, 2)
    assert algebra.form(data.L1, data.f) == 1


def test_h_is_found_when_not_supplied(sl3):
    _, realization, data = sl3
    found = nilstruct.sl2_complete(data.algebra, realization.L1)
    assert found.h == data.h
    assert found.degree_of == data.degree_of


def test_regular_grading(sl3):
    _, _, data = sl3
    assert data.dims == {-2: 1, -1: 2, 0: 2, 1: 2, 2: 1}
    pieces = nilstruct.dynkin_grading(data)
    assert len(pieces[0]) == len(pieces[1])
    assert nilstruct.grading_failures(data) == []


def test_non_nilpotent_element_is_rejected(sl3):
    _, realization, data = sl3
    with pytest.raises(Sl2Error):
        nilstruct.sl2_complete(data.algebra, realization.h)
    with pytest.raises(Sl2Error):
        nilstruct.sl2_complete(data.algebra, {})


def test_wrong_h_is_rejected(sl3):
    _, realization, data = sl3
    with pytest.raises(Sl2Error):
        nilstruct.sl2_complete(data.algebra, realization.L1, vscale(realization.h, 2))


def test_minimal_nilpotent_of_sl3_has_no_even_triple(sl3):
    _, _, data = sl3
    algebra = data.algebra
    E12 = algebra.coordinates({(0, 1): ONE})
    with pytest.raises(CertificateError):
        nilstruct.sl2_complete(algebra, E12)


def test_grading_must_be_distinguished(sl3):
    _, _, data = sl3
    fake = nilstruct.Sl2Data(data.algebra, data.L1, data.h, data.f, [0, 0, 1])
    with pytest.raises(GradingError):
        nilstruct.dynkin_grading(fake)
    assert nilstruct.dynkin_grading(fake, distinguished=False) == {0: [0, 1], 1: [2]}


@pytest.mark.parametrize(
    "eta,order,expected",
    [(1, 0, 1), (1, 1, -2), (1, 2, 2), (2, 1, -4), (2, 4, 24), (3, 1, -6), (3, 2, 30)],
)
def test_theta(eta, order, expected):
    assert nilstruct.theta(eta, order) == rat(expected)


def test_regular_semisimple_detection(sl3):
    _, _, data = sl3
    algebra = data.algebra
    assert nilstruct.is_regular_semisimple(algebra, data.h)
    assert not nilstruct.is_regular_semisimple(algebra, data.L1)


def test_find_k1(sl3):
    orbit, _, data = sl3
    K1 = nilstruct.find_k1(data, orbit.eta_r)
    assert data.degrees(K1) == [-orbit.eta_r]
    assert nilstruct.is_regular_semisimple(data.algebra, vadd(data.L1, K1))


def test_opposite_cartan_gram(sl3, sl3_cartan):
    orbit, _, data = sl3
    cartan, _ = sl3_cartan
    algebra = data.algebra
    r, period = orbit.rank, orbit.eta_r + 1
    for i in range(r):
        for j in range(r):
            expected = period if i + j == r - 1 else 0
            assert algebra.form(cartan.Y[i], cartan.Y[j]) == expected
    assert cartan.L[0] == data.L1
    assert algebra.form(data.f, cartan.L[0]) == 1
    assert nilstruct.cartan_identity_failures(data, orbit, cartan) == []


def test_module_decomposition(sl3, sl3_cartan):
    orbit, _, data = sl3
    _, modules = sl3_cartan
    assert modules.weights == orbit.weights == [1, 2]
    assert modules.gamma[0] == data.f
    assert nilstruct.pairing_table_failures(data, modules) == []
    assert nilstruct.weight_failures(data, modules) == []


def test_pairing_table_limit(sl3, sl3_cartan):
    _, _, data = sl3
    _, modules = sl3_cartan
    broken = nilstruct.ModuleData(modules.weights, modules.L, [vscale(g, 2) for g in modules.gamma])
    assert nilstruct.pairing_table_failures(data, broken)
    assert len(nilstruct.pairing_table_failures(data, broken, limit=1)) <= 1


def test_vec_json(sl3):
    _, _, data = sl3
    algebra = data.algebra
    payload = nilstruct.vec_to_json(algebra, data.h)
    assert nilstruct.vec_from_json(algebra, payload) == data.h


@pytest.mark.parametrize(
    "orbit",
    [("A", 1, "a0"), ("B", 2, "a0"), ("C", 2, "a0"), ("D", 4, "a1"), ("B", 4, "a2")],
)
def test_cartan_stage_certificates(staged, orbit):
    state, report = staged(orbit, through="cartan")
    assert report.passed, [c for c in report.certificates if not c.passed]
    assert state.modules.weights == lookup(*orbit).weights
    assert len(state.cartan.Y) == orbit[1]
