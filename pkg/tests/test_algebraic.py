import pytest

from walgebra.exceptions import BranchPointError, VariableTableError
from walgebra.services.algebraic import AlgebraicFn, AlgebraicRing, MapToRing, change_root, common_numerators, depress
from walgebra.services.symcore import GradedRing, rat


@pytest.fixture
def sqrt_ring():
    """T = sqrt(x)."""
    full = GradedRing(["x", "T"], [2, 1])
    return AlgebraicRing(["x"], [2], [("T", 1)], [full.parse("T**2 - x")])


@pytest.fixture
def cubic_ring():
    """T^3 + x T + y = 0, quasihomogeneous with T of weight 1."""
    full = GradedRing(["x", "y", "T"], [2, 3, 1])
    return AlgebraicRing(["x", "y"], [2, 3], [("T", 1)], [full.parse("T**3 + x*T + y")])


def test_reduction_modulo_relation(sqrt_ring):
    T, x = sqrt_ring.gen("T"), sqrt_ring.gen("x")
    assert (T * T * T).num == (x * T).num
    assert T ** 2 == x
    assert sqrt_ring.basis() == [sqrt_ring.full.one, sqrt_ring.full.gen("T")]


def test_inverse_and_division(sqrt_ring):
    T, x = sqrt_ring.gen("T"), sqrt_ring.gen("x")
    inv = T.inverse()
    assert inv * T == 1
    assert inv == T / x
    assert (x + T) / (x + T) == 1
    with pytest.raises(BranchPointError):
        sqrt_ring.zero.inverse()


def test_implicit_derivative(sqrt_ring):
    """d sqrt(x)/dx = 1 / (2 sqrt(x))."""
    T, x = sqrt_ring.gen("T"), sqrt_ring.gen("x")
    assert T.partial("x") == T / (x * 2)
    assert (T * x).partial("x") == T * rat("3/2")


def test_mixed_partials_commute(cubic_ring, rng):
    names = ["x", "y", "T"]
    for _ in range(1000):
        f = cubic_ring.zero
        for _ in range(3):
            term = cubic_ring.const(int(rng.integers(-6, 7)))
            for name in names:
                term = term * cubic_ring.gen(name) ** int(rng.integers(0, 3))
            f = f + term
        assert f.partial("x").partial("y") == f.partial("y").partial("x")


def test_relation_validation():
    full = GradedRing(["x", "T"], [2, 1])
    with pytest.raises(BranchPointError):
        AlgebraicRing(["x"], [2], [("T", 1)], [full.parse("x*T**2 - 1")])
    with pytest.raises(VariableTableError):
        AlgebraicRing(["x"], [2], [("T", 1)], [full.parse("x - 1")])
    with pytest.raises(VariableTableError):
        AlgebraicRing(["x"], [2], [("T", 1)], [])


def test_non_monic_constant_lead_is_normalized():
    full = GradedRing(["x", "T"], [2, 1])
    ring = AlgebraicRing(["x"], [2], [("T", 1)], [full.parse("4*T**2 - x")])
    assert ring.relations[0] == full.parse("T**2 - x/4")


def test_ring_json(cubic_ring):
    assert AlgebraicRing.from_json(cubic_ring.to_json()) == cubic_ring
    f = cubic_ring.gen("T") / cubic_ring.gen("x")
    assert AlgebraicFn.from_json(cubic_ring, f.to_json()) == f


def test_change_root_rescales(sqrt_ring):
    target, mapping = change_root(sqrt_ring, 0, 2, sqrt_ring.base.zero, "S")
    assert target.aux_names == ("S",)
    assert target.relations[0] == target.full.parse("S**2 - x/4")
    image = mapping(sqrt_ring.gen("T"))
    assert image == target.gen("S") * 2
    assert image ** 2 == target.gen("x")


def test_depress_removes_subleading_power():
    full = GradedRing(["x", "y", "T"], [2, 1, 1])
    ring = AlgebraicRing(["x", "y"], [2, 1], [("T", 1)], [full.parse("T**2 + 2*y*T - x")])
    target, mapping, shift = depress(ring)
    assert shift == -full.gen("y")
    assert target.relations[0] == target.full.parse("T**2 - y**2 - x")
    assert mapping(ring.gen("T")) == target.gen("T") - target.gen("y")


def test_weighted_degrees_and_common_numerators(cubic_ring):
    T, x, y = cubic_ring.gen("T"), cubic_ring.gen("x"), cubic_ring.gen("y")
    f = (T * y + x * x) / x
    assert f.weighted_degrees() == [2]
    nums, den = common_numerators([f, T])
    assert den == cubic_ring.full.gen("x")
    assert nums[1] == cubic_ring.full.gen("x") * cubic_ring.full.gen("T")
    with pytest.raises(ValueError):
        common_numerators([])


def test_mixed_rings_are_rejected(sqrt_ring, cubic_ring):
    with pytest.raises(VariableTableError):
        sqrt_ring.gen("T") + cubic_ring.gen("T")


def test_map_from_generator_images(sqrt_ring):
    """x -> 4x, T -> 2T keeps T^2 = x."""
    full = sqrt_ring.full
    mapping = MapToRing.from_generators(sqrt_ring, sqrt_ring, [full.gen("x") * 4, full.gen("T") * 2])
    T, x = sqrt_ring.gen("T"), sqrt_ring.gen("x")
    assert mapping(T) == T * 2
    assert mapping(T * x + 1) == T * x * 8 + 1
    assert mapping(AlgebraicFn(sqrt_ring, full.gen("T"), full.gen("x"))) == AlgebraicFn(sqrt_ring, full.gen("T"), full.gen("x") * 2)
    with pytest.raises(VariableTableError):
        MapToRing.from_generators(sqrt_ring, sqrt_ring, [full.gen("x")])


def test_from_generators_agrees_with_change_root(sqrt_ring):
    target, mapping = change_root(sqrt_ring, 0, 2, sqrt_ring.base.zero, "S")
    same = MapToRing.from_generators(sqrt_ring, target, mapping.gens)
    f = AlgebraicFn(sqrt_ring, sqrt_ring.full.parse("T*x + 3"), sqrt_ring.full.gen("x"))
    assert same(f) == mapping(f)


def test_sum_keeps_the_common_denominator(cubic_ring):
    full = cubic_ring.full
    x, T = full.gen("x"), full.gen("T")
    a = AlgebraicFn(cubic_ring, T, x)
    b = AlgebraicFn(cubic_ring, full.one, x ** 2)
    total = a + b
    assert total.den == x ** 2
    assert total.num == x * T + 1
    assert (b + a).den == x ** 2
    c = AlgebraicFn(cubic_ring, full.one, full.gen("y"))
    assert (a + c).den == x * full.gen("y")
