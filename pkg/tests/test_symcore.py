import pytest

from walgebra.exceptions import SingularSystemError, VariableTableError
from walgebra.services.symcore import (
    ONE,
    ZERO,
    GradedRing,
    coefficient,
    compose,
    determinant,
    evaluate,
    format_rat,
    inverse,
    nullspace,
    partial,
    poly_arith,
    poly_from_json,
    rank,
    rat,
    sample_points,
    solve_linear,
    substitute,
    value_at,
)


@pytest.fixture
def graded():
    return GradedRing(["t1", "t2", "t3"], [1, 2, "1/3"])


def test_rat_conversions():
    """Ints, fraction strings and rationals all land in QQ."""
    assert rat(3) == 3
    assert rat("-7/21") == rat(-1) / 3
    assert rat(" 5 ") == 5
    assert format_rat(rat("4/2")) == "2"
    assert format_rat(rat("-3/9")) == "-1/3"
    with pytest.raises(TypeError):
        rat(True)


def test_graded_ring_rejects_bad_tables():
    with pytest.raises(VariableTableError):
        GradedRing(["x", "x"], [1, 1])
    with pytest.raises(VariableTableError):
        GradedRing(["x"], [1, 2])
    with pytest.raises(VariableTableError):
        GradedRing(["x"], [-1])


def test_weighted_degrees(graded):
    t1, t2, t3 = (graded.gen(n) for n in graded.names)
    p = t1 ** 2 + t2 + 3 * t3 ** 6
    assert graded.is_homogeneous(p, 2)
    assert graded.homogeneous_degree(p) == 2
    assert not graded.is_homogeneous(p + t1)
    assert graded.homogeneous_degree(graded.zero) is None
    assert graded.degree_part(p + t1, 1) == t1
    assert graded.linear_part(p + t1) == t1 + t2


def test_mixed_tables_are_rejected(graded):
    other = GradedRing(["t1", "t2"], [1, 2])
    with pytest.raises(VariableTableError):
        poly_arith(graded.gen("t1"), other.gen("t1"), "+")
    with pytest.raises(VariableTableError):
        graded.check(other.gen("t1"))


def test_convert_by_name(graded):
    small = GradedRing(["t2", "t1"], [2, 1])
    p = small.gen("t1") * small.gen("t2") + 1
    moved = graded.convert(p)
    assert moved == graded.gen("t1") * graded.gen("t2") + 1
    with pytest.raises(VariableTableError):
        small.convert(graded.gen("t3"))


def test_substitute_and_compose(graded):
    t1, t2, t3 = (graded.gen(n) for n in graded.names)
    p = t1 ** 2 * t2 - t3
    q = substitute(p, {"t1": t2 + 1})
    assert q == (t2 + 1) ** 2 * t2 - t3
    target = GradedRing(["u"], [1])
    u = target.gen("u")
    assert compose(t1 * t2, [u, u ** 2, None], target.ring) == u ** 3
    with pytest.raises(VariableTableError):
        compose(t3, [u, u, None], target.ring)


def test_partial_and_coefficient(graded):
    t1, t2, _ = (graded.gen(n) for n in graded.names)
    p = 5 * t1 ** 3 * t2 + t2 ** 2
    assert partial(p, "t1") == 15 * t1 ** 2 * t2
    assert partial(p, "t1", 4) == 0
    assert coefficient(p, (3, 1, 0)) == 5
    assert coefficient(p, (1, 1, 0)) == ZERO


def test_mixed_partials_commute(graded, rng):
    """d/dx d/dy = d/dy d/dx on random polynomials."""
    gens = [graded.gen(n) for n in graded.names]
    for _ in range(200):
        p = graded.zero
        for _ in range(4):
            term = graded.const(int(rng.integers(-9, 10)))
            for g in gens:
                term *= g ** int(rng.integers(0, 4))
            p += term
        a, b = (str(name) for name in rng.choice(graded.names, 2, replace=False))
        assert partial(partial(p, a), b) == partial(partial(p, b), a)


def test_json_codec_checks_table(graded):
    p = graded.gen("t1") * rat("2/3") - graded.gen("t3") ** 3
    data = graded.to_json(p)
    assert data["terms"][0]["coeff"] in ("2/3", "-1")
    assert poly_from_json(data, graded) == p
    with pytest.raises(VariableTableError):
        poly_from_json(data, GradedRing(["t1", "t2", "t3"], [1, 1, 1]))
    data["terms"][0]["exps"] = [1, 0]
    with pytest.raises(VariableTableError):
        poly_from_json(data)


def test_parse_and_evaluate(graded):
    p = graded.parse("t1**2 - 3/4*t2")
    assert evaluate(p, {"t1": 2}) == 4 - graded.gen("t2") * rat("3/4")
    assert value_at(p, [2, 4, 0]) == 1


def test_linear_algebra():
    rows = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
    assert rank(rows) == 2
    kernel = nullspace(rows, 3)
    assert len(kernel) == 1
    for row in rows:
        assert sum(a * b for a, b in zip(row, kernel[0])) == 0
    assert solve_linear([[2, 0], [0, 4]], [1, 1], 2, unique=True) == [rat("1/2"), rat("1/4")]
    with pytest.raises(SingularSystemError):
        solve_linear([[1, 1], [1, 1]], [0, 1], 2)
    with pytest.raises(SingularSystemError):
        solve_linear([[1, 1]], [1], 2, unique=True)
    assert determinant([[2, 1], [1, 1]]) == 1
    assert inverse([[2, 1], [1, 1]]) == [[1, -1], [-1, 2]]
    with pytest.raises(SingularSystemError):
        inverse([[1, 1], [1, 1]])


def test_sample_points_are_deterministic():
    first = sample_points(5, 3, seed=7)
    assert first == sample_points(5, 3, seed=7)
    assert first != sample_points(5, 3, seed=8)
    assert all(len(p) == 3 for p in first)
    assert ONE == rat(1)
