"""End-to-end F4(a2): invariants, N, the W-algebra and the algebraic potential."""
import pytest

from walgebra.services import slice as slicing
from walgebra.services.frob import s_name
from walgebra.services.symcore import rat

pytestmark = pytest.mark.slow

F4A2 = ("F", 4, "a2")


@pytest.fixture(scope="module")
def f4a2(staged):
    return staged(F4A2, through="verify")


def certificates(report):
    return {c.name: c for c in report.certificates}


def test_every_certificate_passes(f4a2):
    _, report = f4a2
    assert [c.name for c in report.certificates if not c.passed] == []


def test_golden_certificates_present(f4a2):
    _, report = f4a2
    names = certificates(report)
    for name in ("golden_invariants", "golden_coordinates", "golden_equations", "golden_potential", "golden_charge"):
        assert names[name].passed, names[name].failures


def test_leading_terms(f4a2):
    _, report = f4a2
    assert report.det_omega1 == "1296"
    assert "antidiagonal" in certificates(report)["det_omega1"].detail


def test_N_has_one_cubic_root(f4a2):
    state, report = f4a2
    assert len(report.minimal_polynomials) == 1
    ring = state.solution.ring
    assert ring.degrees == [3]
    assert len(state.solution.order) == 4


def test_potential(f4a2):
    state, report = f4a2
    pot = state.potential
    assert report.charge == "2/3"
    assert report.degrees == ["1/3", "1/3", "1", "1"]
    root = pot.ring.full.index(pot.ring.aux_names[0])
    assert pot.F.num.degree(root) > 0
    assert report.euler_field == " + ".join(f"{d} {s_name(i)} d/d{s_name(i)}" for i, d in enumerate(report.degrees))


def test_N_presentations(f4a2):
    state, report = f4a2
    assert certificates(report)["N_presentations"].passed
    assert slicing.bracket_equations(state.brackets, 4)


def test_reduced_first_row(f4a2):
    state, report = f4a2
    bracket = state.pencil.bracket
    assert bracket.rows == [0]
    assert bracket.central_charge == rat("-1/2")
    assert report.central_charge == "-1/2"
    assert certificates(report)["reduction_to_N"].passed
