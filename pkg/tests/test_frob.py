import pytest

from walgebra.exceptions import ReconstructionError
from walgebra.services import frob
from walgebra.services.algebraic import AlgebraicRing
from walgebra.services.symcore import ZERO, rat

A2 = ("A", 2, "a0")


@pytest.fixture(scope="module")
def sl3_frobenius(staged):
    return staged(A2, through="frobenius")


def test_sl3_potential_is_polynomial(sl3_frobenius):
    state, report = sl3_frobenius
    pot = state.potential
    assert report.passed, [c for c in report.certificates if not c.passed]
    assert pot.F.is_polynomial()
    assert pot.ring.is_trivial


def test_sl3_charge_and_degrees(sl3_frobenius):
    state, report = sl3_frobenius
    pot = state.potential
    assert pot.charge == rat("1/3")
    assert pot.degrees == [rat("2/3"), rat(1)]
    assert report.charge == "1/3"
    assert report.degrees == ["2/3", "1"]
    assert report.euler_field == "2/3 s1 d/ds1 + 1 s2 d/ds2"


def test_sl3_unity_and_metric(sl3_frobenius):
    state, _ = sl3_frobenius
    pot = state.potential
    third = frob.third_derivatives(pot)
    assert third[(1, 1, 0)] == 1
    assert third[(1, 1, 1)] == 0
    assert pot.eta(0, 1) == 1 and pot.eta(0, 0) == ZERO


def test_sl3_flat_coordinates_report(sl3_frobenius):
    _, report = sl3_frobenius
    assert [line.split(" = ")[0] for line in report.flat_coordinates] == ["s1", "s2"]
    assert report.potential


def test_flat_pencil_checks(sl3_frobenius):
    state, _ = sl3_frobenius
    pencil, solution = state.pencil, state.solution
    flat = frob.flat_coordinates(pencil, solution.ring, [1, 2])
    fp = frob.to_flat(pencil, solution.ring, flat, [1, 2])
    assert fp.charge == rat("1/3")
    assert frob.regularity_spectrum(fp) == [rat("1/3"), rat("2/3")]
    assert all(not failures for failures in frob.pencil_verify(fp).values())


def three_field_potential(tail):
    """``1/2 s3^2 s1 + 1/2 s3 s2^2 + tail(s1, s2)`` with unity ``d/ds3``."""
    ring = AlgebraicRing(["s1", "s2", "s3"], [1, 1, 1])
    s1, s2, s3 = (ring.gen(frob.s_name(i)) for i in range(3))
    F = s3 * s3 * s1 * rat("1/2") + s3 * s2 * s2 * rat("1/2") + tail(s1, s2)
    gradient = [F.partial(frob.s_name(i)) for i in range(3)]
    hessian = [[gradient[j].partial(frob.s_name(i)) for j in range(3)] for i in range(3)]
    return frob.FrobeniusPotential(ring, F, gradient, hessian, ZERO, [ZERO] * 3)


def test_wdvv_accepts_solution():
    pot = three_field_potential(lambda s1, s2: s1 * s1 * s2)
    results = frob.wdvv_verify(pot)
    assert results["wdvv"] == []
    assert results["unity"] == []


def test_wdvv_detects_violation():
    pot = three_field_potential(lambda s1, s2: s1 * s1 * s1)
    results = frob.wdvv_verify(pot)
    assert results["wdvv"]
    assert results["unity"] == []


def test_wdvv_sweep_can_be_skipped():
    pot = three_field_potential(lambda s1, s2: s1 * s1 * s1)
    assert frob.wdvv_verify(pot, full=False)["wdvv"] == []


def test_reconstruction_rejects_inconsistent_metric(sl3_frobenius):
    state, _ = sl3_frobenius
    pencil, solution = state.pencil, state.solution
    flat = frob.flat_coordinates(pencil, solution.ring, [1, 2])
    fp = frob.to_flat(pencil, solution.ring, flat, [1, 2])
    fp.Omega2 = [row[:] for row in fp.Omega2]
    fp.Omega2[0][1] = fp.Omega2[0][1] + fp.ring.gen("s1")
    with pytest.raises(ReconstructionError):
        frob.potential_reconstruct(fp)
