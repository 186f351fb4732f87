import pytest

from walgebra.services import dsred
from walgebra.services import slice as slicing
from walgebra.services.algebraic import AlgebraicRing
from walgebra.services.catalog import lookup
from walgebra.services.jets import DeltaDist, JetRing
from walgebra.services.liealg import vadd, vscale
from walgebra.services.symcore import GradedRing, rat

A1 = ("A", 1, "a0")
A2 = ("A", 2, "a0")


@pytest.fixture(scope="module")
def sl2(staged):
    state, _ = staged(A1, through="slice")
    return state


@pytest.fixture(scope="module")
def sl2_bracket(sl2):
    return dsred.w_brackets(sl2.data, sl2.modules, sl2.cartan, sl2.coords, lookup(*A1))


@pytest.fixture(scope="module")
def sl3(staged):
    state, _ = staged(A2, through="ds")
    return state


def test_b_minus_basis(sl2):
    basis = dsred.b_minus_basis(sl2.data, sl2.modules)
    assert basis.index == [(0, 0), (0, 1)]
    assert basis.degree == [-1, 0]
    assert basis.e[0] == sl2.data.f
    assert basis.e[1] == vscale(sl2.data.h, 2)
    assert basis.a[0] == sl2.data.L1
    assert basis.a[1] == sl2.data.h


def test_gauge_gives_miura_map(sl2):
    gs = dsred.gauge_fix(sl2.data, sl2.modules)
    jets = gs.jets
    b0, b1 = jets.jet("b1_0"), jets.jet("b1_1")
    assert gs.z == [b0 - jets.jet("b1_1", 1) + b1 ** 2]
    assert dsred.gauge_failures(gs, sl2.modules, 1) == []
    assert dsred.gauge_spot_failures(gs, sl2.data, sl2.modules, seed=11) == []


def test_truncated_gauge_keeps_linear_part(sl2):
    gs = dsred.gauge_fix(sl2.data, sl2.modules, truncation=1)
    jets = gs.jets
    assert gs.z == [jets.jet("b1_0") - jets.jet("b1_1", 1)]
    assert dsred.gauge_spot_failures(gs, sl2.data, sl2.modules, seed=11) == []


def test_sl2_bracket_matches_hand_derivation(sl2_bracket):
    jets = sl2_bracket.jets
    t1, lam = jets.jet("t1"), jets.gen("lam")
    expected = DeltaDist(jets, {3: jets.const(rat("-1/2")), 1: (t1 + lam) * 2, 0: jets.jet("t1", 1)})
    assert sl2_bracket.K[0][0] == expected


def test_sl2_exactness(sl2_bracket):
    failures, c = dsred.exactness_check(sl2_bracket, 1)
    assert failures == []
    assert c == rat("-1/2")
    assert sl2_bracket.central_charge == c


def test_sl2_pencil_parts(sl2_bracket):
    jets = sl2_bracket.jets
    K1, K2 = dsred.pencil_parts(sl2_bracket)
    assert K1[0][0] == DeltaDist(jets, {1: jets.const(2)})
    assert K2[0][0].coefficient(1) == jets.jet("t1") * 2


def test_sl2_leading_terms(sl2, sl2_bracket):
    ld = dsred.leading_terms(sl2_bracket, sl2.coords)
    ring = ld.ring
    assert ld.Omega1 == [[ring.const(2)]]
    assert ld.Omega2 == [[ring.gen("t1") * 2]]
    assert ld.Gamma2 == [[[ring.const(1)]]]
    assert ld.F1 == [[ring.zero]] and ld.F2 == [[ring.zero]]
    assert dsred.det_omega1(ld, 1) == 2
    failures, sign = dsred.leading_failures(ld, sl2.brackets.F1_t, sl2.brackets.F2_t, [1], 1)
    assert failures == []
    assert sign in (1, -1)


def test_sl2_skew_and_jacobi(sl2_bracket):
    assert dsred.skew_failures(sl2_bracket) == []
    assert dsred.jacobi_failures(sl2_bracket) == []


def test_sl2_linear_gauge(sl2):
    basis = dsred.b_minus_basis(sl2.data, sl2.modules)
    gs = dsred.gauge_fix(sl2.data, sl2.modules)
    z_jets = JetRing(["z1"], [2], dsred.default_jet_order(lookup(*A1)), [("lam", 0)])
    D = dsred.linear_gauge(sl2.data, sl2.modules, basis, z_jets)
    assert dsred.gauge_invariance_failures(gs, D, z_jets, basis) == []


def test_default_jet_order():
    assert dsred.default_jet_order(lookup(*A1)) == 6
    assert dsred.default_jet_order(lookup("F", 4, "a2")) == 14


def test_full_check_policy():
    assert dsred.should_run_full_checks(lookup(*A2), False)
    assert not dsred.should_run_full_checks(lookup("F", 4, "a2"), False)
    assert dsred.should_run_full_checks(lookup("F", 4, "a2"), True)


def test_sl3_reduction(staged):
    _, report = staged(A2, through="ds")
    assert report.passed, [c for c in report.certificates if not c.passed]
    assert report.det_omega1 == "-9"
    names = {c.name for c in report.certificates}
    assert {"exactness", "leading_terms", "det_omega1", "w_jacobi", "gauge_linearization", "reduction_to_N"} <= names


def test_gauge_action_with_x_dependent_w(sl2):
    data = sl2.data
    w0, w1 = rat(2), rat("1/3")
    w = [vscale(data.f, w0), vscale(data.f, w1), {}]
    moved = dsred.gauge_action(data.algebra, w, [data.L1, {}, {}])
    assert moved[0] == vadd(data.L1, vscale(data.h, -2 * w0), vscale(data.f, -(w0 ** 2 + w1)))
    assert moved[1] == vadd(vscale(data.h, -2 * w1), vscale(data.f, -2 * w0 * w1))
    assert moved[2] == vscale(data.f, -2 * w1 ** 2)


def test_gauge_spot_catches_a_broken_solution(sl2):
    gs = dsred.gauge_fix(sl2.data, sl2.modules)
    jets = gs.jets
    gs.z = [gs.z[0] + jets.jet("b1_0")]
    assert dsred.gauge_spot_failures(gs, sl2.data, sl2.modules, seed=11, samples=4)
    truncated = dsred.gauge_fix(sl2.data, sl2.modules, truncation=1)
    truncated.z = [truncated.z[0] + truncated.jets.jet("b1_0")]
    assert dsred.gauge_spot_failures(truncated, sl2.data, sl2.modules, seed=11, samples=4)


def test_sl3_w3_bracket(sl3):
    """``W_3`` with ``c = -1/2`` and the ``D^5`` coefficient fixed by docs/sl3_oracle.md."""
    wb = dsred.w_brackets(sl3.data, sl3.modules, sl3.cartan, sl3.coords, lookup(*A2))
    jets = wb.jets
    lam = jets.gen("lam")

    def t(k, m=0):
        return jets.jet(f"t{k}", m)

    K = {
        (0, 0): {3: jets.const(rat("-1/2")), 1: t(1) * 2, 0: t(1, 1)},
        (0, 1): {1: (t(2) + lam) * 3, 0: t(2, 1) * 2},
        (1, 0): {1: (t(2) + lam) * 3, 0: t(2, 1)},
        (1, 1): {
            5: jets.const(rat("2/3")),
            3: t(1) * rat("-40/3"),
            2: t(1, 1) * -20,
            1: t(1, 2) * -12 + t(1) ** 2 * rat("128/3"),
            0: t(1, 3) * rat("-8/3") + t(1) * t(1, 1) * rat("128/3"),
        },
    }
    for (u, v), terms in K.items():
        assert wb.K[u][v] == DeltaDist(jets, terms), (u, v)
    K1, _ = dsred.pencil_parts(wb)
    assert K1[0][0] == DeltaDist(jets) and K1[1][1] == DeltaDist(jets)
    assert K1[0][1] == DeltaDist(jets, {1: jets.const(3)})


def test_sl3_bracket_on_N(sl3):
    bracket = sl3.pencil.bracket
    jets = bracket.jets
    assert bracket.rows == [0, 1]
    assert bracket.central_charge == rat("-1/2")
    t1 = jets.gen(0)
    expected = {
        5: jets.ring.const(rat("2/3")),
        3: t1 * rat("-40/3"),
        2: jets.gen(0, 1) * -20,
        1: jets.gen(0, 2) * -12 + t1 ** 2 * rat("128/3"),
        0: jets.gen(0, 3) * rat("-8/3") + t1 * jets.gen(0, 1) * rat("128/3"),
    }
    assert dsred.same_operator(bracket.K2[(1, 1)], expected)
    assert dsred.same_operator(bracket.K1[(0, 1)], {1: jets.ring.const(3)})
    assert dsred.reduced_skew_failures(bracket, 2) == []
    ring = sl3.solution.ring
    assert sl3.pencil.Omega1 == [[ring.zero, ring.const(3)], [ring.const(3), ring.zero]]
    assert sl3.pencil.failures == []


def test_reduction_rows_can_be_limited(sl3):
    wb = dsred.w_brackets(sl3.data, sl3.modules, sl3.cartan, sl3.coords, lookup(*A2))
    dsred.exactness_check(wb, 2)
    ld = dsred.leading_terms(wb, sl3.coords)
    pencil = dsred.dirac_to_N(wb, ld, sl3.solution, sl3.coords, 2, rows=[0])
    assert pencil.failures == []
    assert pencil.bracket.rows == [0]
    assert 5 not in pencil.bracket.K2[(1, 1)]
    assert pencil.Omega2 == sl3.pencil.Omega2
    assert pencil.Gamma2 == sl3.pencil.Gamma2


def test_jets_on_N_chain_rule():
    base = GradedRing(["t1", "t2"], [2, 1])
    T = base.gen("t2")
    ring = AlgebraicRing(["t1"], [2], [("t2", 1)], [T ** 2 - base.gen("t1")])
    solution = slicing.NSolution([], ring, {"t2": ring.gen("t2")}, ["t2"])
    source = JetRing(["t1", "t2"], [2, 1], 3, [("lam", 0)])
    jets = dsred.JetsOnN(solution, source, 1)
    t1, t1x, t1xx, root = jets.gen(0), jets.gen(0, 1), jets.gen(0, 2), jets.ring.gen("t2_0")
    assert jets.restrict(source.jet("t2", 1)) == root * t1x / (t1 * 2)
    assert jets.restrict(source.jet("t2") * source.jet("t2", 2)) == t1xx / 2 - t1x ** 2 / (t1 * 4)
    assert jets.restrict(source.jet("t2") ** 2 + source.jet("t1", 1)) == t1 + t1x
    assert jets.to_base(root * t1) == ring.gen("t2") * ring.gen("t1")
