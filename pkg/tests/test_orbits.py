import pytest

from walgebra.exceptions import UnsupportedOrbitError
from walgebra.services import nilstruct, orbits
from walgebra.services.catalog import lookup
from walgebra.services.liealg import vscale


@pytest.mark.parametrize(
    "orbit,size,parts",
    [
        (("A", 2, "a0"), 3, [3]),
        (("C", 2, "a0"), 4, [4]),
        (("B", 3, "a0"), 7, [7]),
        (("D", 4, "a0"), 8, [7, 1]),
        (("D", 4, "a1"), 8, [5, 3]),
        (("B", 4, "a2"), 9, [5, 3, 1]),
    ],
)
def test_classical_realizations(orbit, size, parts):
    row = lookup(*orbit)
    realization = orbits.realize(row)
    algebra = realization.algebra
    assert algebra.size == size
    assert algebra.dim == row.dimension
    assert f"Jordan type {parts}" in realization.notes
    assert algebra.bracket(realization.h, realization.L1) == realization.L1
    assert nilstruct.matrix_power_zero(algebra.matrix(realization.L1), size)


def test_realized_grading_is_even_and_distinguished():
    row = lookup("B", 4, "a2")
    realization = orbits.realize(row)
    data = nilstruct.sl2_complete(realization.algebra, realization.L1, realization.h)
    pieces = nilstruct.dynkin_grading(data)
    assert len(pieces[0]) == len(pieces[1])
    assert max(pieces) == row.eta_r


def test_f4_regular():
    realization = orbits.realize(lookup("F", 4, "a0"))
    assert realization.algebra.dim == 52
    assert realization.h is None and realization.cartan is None
    data = nilstruct.sl2_complete(realization.algebra, realization.L1)
    assert max(data.degree_of) == 11


@pytest.mark.parametrize("table", ["corrected", "raw"])
def test_f4a2_hints(f4a2_orbit, table):
    realization = orbits.realize(f4a2_orbit, table)
    assert len(realization.cartan) == 4
    assert len(realization.extras) == 4
    assert len(realization.gamma) == 8
    assert table in realization.notes[0]


def test_f4a2_corrected_triple(f4a2_orbit):
    realization = orbits.realize(f4a2_orbit, "corrected")
    algebra = realization.algebra
    assert algebra.bracket(realization.h, realization.L1) == realization.L1
    assert algebra.bracket(realization.L1, realization.f) == vscale(realization.h, 2)


def test_unrealized_orbit():
    with pytest.raises(UnsupportedOrbitError):
        orbits.realize(lookup("E", 8, "a7"))


def test_hint_gamma_order(f4a2_orbit):
    realization = orbits.realize(f4a2_orbit)
    assert orbits.hint_gamma(realization, None, False) is realization.gamma
    assert orbits.hint_gamma(realization, [0, 1, 2, 3], True) is None
    swapped = orbits.hint_gamma(realization, [0, 2, 1, 3], False)
    assert swapped[1] == realization.gamma[2]
    assert swapped[2] == realization.gamma[1]
    assert swapped[4:] == realization.gamma[4:]


def test_classical_rows_have_no_hints():
    realization = orbits.realize(lookup("A", 2, "a0"))
    assert orbits.hint_gamma(realization, None, False) is None
