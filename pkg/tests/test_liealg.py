import pytest

from walgebra.exceptions import ConfigError, FormNormalizationError, OutsideSpanError
from walgebra.services.liealg import (
    MatrixLieAlgebra,
    build_classical,
    build_sl,
    commutator,
    unit,
    vadd,
    vscale,
)
from walgebra.services.symcore import ONE, rat


@pytest.mark.parametrize(
    "series, rank, dim",
    [("A", 1, 3), ("A", 3, 15), ("B", 2, 10), ("C", 2, 10), ("C", 3, 21), ("D", 3, 15), ("D", 4, 28)],
)
def test_classical_dimensions_and_identities(series, rank, dim):
    algebra = build_classical(series, rank)
    assert algebra.dim == dim
    assert algebra.rank == rank
    assert algebra.jacobi_failures(30, seed=1) == []
    assert algebra.invariance_failures(30, seed=2) == []


def test_partitioned_orthogonal_form():
    """B4 on blocks [5, 3, 1] is still so(9)."""
    algebra = build_classical("B", 4, [5, 3, 1])
    assert algebra.dim == 36
    assert algebra.jacobi_failures(20, seed=3) == []


def test_bad_requests():
    with pytest.raises(ConfigError):
        build_sl(1)
    with pytest.raises(ConfigError):
        build_classical("D", 2)
    with pytest.raises(ConfigError):
        build_classical("B", 3, [4, 2])
    with pytest.raises(ConfigError):
        build_classical("G", 2)
    with pytest.raises(ConfigError):
        build_sl(2).index("E9_9")


def test_structure_constants_are_skew():
    algebra = build_sl(3)
    for a in range(algebra.dim):
        for b in range(algebra.dim):
            assert algebra.structure(a, b) == vscale(algebra.structure(b, a), -1)


def test_bracket_matches_matrix_commutator(rng):
    algebra = build_classical("C", 2)
    for _ in range(50):
        u, v = algebra.random_element(rng), algebra.random_element(rng)
        expected = commutator(algebra.matrix(u), algebra.matrix(v))
        assert algebra.matrix(algebra.bracket(u, v)) == expected


def test_coordinates_outside_span():
    algebra = build_sl(2)
    with pytest.raises(OutsideSpanError):
        algebra.coordinates({(0, 0): ONE, (1, 1): ONE})
    assert algebra.coordinates(unit(0, 1)) == algebra.element("E1_2")


def test_centralizer_of_regular_nilpotent():
    algebra = build_sl(3)
    e = vadd(algebra.element("E1_2"), algebra.element("E2_3"))
    assert len(algebra.centralizer(e)) == 2
    assert len(algebra.centralizer({})) == algebra.dim


def test_form_normalization():
    algebra = build_sl(2)
    e, f = algebra.element("E1_2"), algebra.element("E2_1", 2)
    assert algebra.normalize_form(e, f) == rat("1/2")
    assert algebra.form(e, f) == 1
    with pytest.raises(FormNormalizationError):
        algebra.normalize_form(e, e)


def test_algebra_json():
    algebra = build_classical("B", 2)
    algebra.kappa = rat("1/3")
    copy = MatrixLieAlgebra.from_json(algebra.to_json())
    assert copy.labels == algebra.labels
    assert copy.kappa == rat("1/3")
    for a in range(algebra.dim):
        for b in range(algebra.dim):
            assert copy.structure(a, b) == algebra.structure(a, b)
