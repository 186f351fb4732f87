import pytest

from walgebra.exceptions import JetOrderError, VariableTableError
from walgebra.services.jets import (
    DeltaDist,
    JetRing,
    TwoPointTerm,
    delta_normal_form,
    dist_from_json,
    normal_form_terms,
    operator_matrix_skew_failures,
)
from walgebra.services.symcore import rat


@pytest.fixture
def jets():
    return JetRing(["u", "v"], [2, 3], 6, [("lam", 0)])


def random_poly(jets, rng, max_k=2, terms=3):
    p = jets.zero
    for _ in range(terms):
        term = jets.const(int(rng.integers(-5, 6)))
        for field in jets.fields:
            term *= jets.jet(field, int(rng.integers(0, max_k + 1))) ** int(rng.integers(0, 3))
        p += term
    return p


def test_jet_weights_and_names(jets):
    assert jets.names[:3] == ("u_0", "u_1", "u_2")
    assert jets.weights[jets.jet_index("v", 2)] == 5
    assert jets.weights[jets.index("lam")] == 0
    with pytest.raises(JetOrderError):
        jets.jet("u", 7)
    with pytest.raises(JetOrderError):
        JetRing(["u"], [1], -1)


def test_total_derivative_is_a_derivation(jets, rng):
    """D(pq) = D(p) q + p D(q) on random differential polynomials."""
    for _ in range(1000):
        p, q = random_poly(jets, rng), random_poly(jets, rng)
        D = jets.total_derivative
        assert D(p * q) == D(p) * q + p * D(q)


def test_total_derivative_raises_degree(jets):
    u = jets.jet("u")
    p = u ** 2
    assert jets.total_derivative(p) == 2 * u * jets.jet("u", 1)
    assert jets.is_homogeneous(jets.total_derivative(p, 3), 7)
    assert jets.total_derivative(jets.gen("lam")) == 0
    with pytest.raises(JetOrderError):
        jets.total_derivative(jets.jet("v", 6))


def test_frechet_and_max_jet(jets):
    u, u2, v1 = jets.jet("u"), jets.jet("u", 2), jets.jet("v", 1)
    p = u * u2 + v1
    assert jets.frechet(p, "u") == DeltaDist(jets, {0: u2, 2: u})
    assert jets.max_jet(p, "u") == 2
    assert jets.max_jet(p, "v") == 1
    assert jets.differential_part(p, 1) == v1


def test_delta_normal_form_is_idempotent(jets, rng):
    for _ in range(1000):
        terms = [TwoPointTerm(random_poly(jets, rng, 1, 2), random_poly(jets, rng, 1, 2), int(rng.integers(0, 4)))]
        first = delta_normal_form(jets, terms)
        assert delta_normal_form(jets, normal_form_terms(first)) == first


def test_adjoint_is_an_involution(jets, rng):
    for _ in range(200):
        op = DeltaDist(jets, {m: random_poly(jets, rng, 1, 2) for m in range(3)})
        assert op.adjoint().adjoint() == op


def test_composition_and_adjoint(jets):
    u = jets.jet("u")
    D = DeltaDist.derivation(jets)
    left = D.compose(DeltaDist.multiplication(jets, u))
    assert left == DeltaDist(jets, {0: jets.jet("u", 1), 1: u})
    assert D.adjoint() == -D
    assert (D.compose(D)).adjoint() == D.compose(D)


def test_virasoro_operator_is_skew(jets):
    """-1/2 D^3 + 2u D + u' is skew-adjoint; a bare multiplication is not."""
    u = jets.jet("u")
    K = DeltaDist(jets, {3: jets.const(rat("-1/2")), 1: 2 * u, 0: jets.jet("u", 1)})
    assert K.is_skew(K)
    M = DeltaDist.multiplication(jets, u)
    assert not M.is_skew(M)
    assert operator_matrix_skew_failures([[K]]) == []
    assert operator_matrix_skew_failures([[M]]) == ["K[1][1]"]


def test_symbol_and_json(jets):
    lam = jets.gen("lam")
    K = DeltaDist(jets, {0: jets.jet("v"), 2: jets.one})
    assert K.symbol(lam) == jets.jet("v") + lam ** 2
    assert dist_from_json(jets, K.to_json()) == K
    other = JetRing(["u"], [2], 6)
    with pytest.raises(VariableTableError):
        K + DeltaDist.derivation(other)
