import pytest

from walgebra.exceptions import ConfigError
from walgebra.services import f4
from walgebra.services.liealg import commutator, transpose


@pytest.fixture(scope="module")
def algebra():
    return f4.build_f4_minimal()


def test_dimension_and_labels(algebra):
    assert algebra.dim == 52
    assert algebra.size == 27
    assert algebra.rank == 4
    assert sum(label.startswith("E") for label in algebra.labels) == 24
    assert algebra.labels[-4:] == ["H0001", "H0010", "H0100", "H1000"]


def test_lie_identities(algebra):
    assert algebra.jacobi_failures(20, seed=5) == []
    assert algebra.invariance_failures(20, seed=6) == []


def test_root_vectors_follow_the_commutator_table():
    roots = f4.positive_root_vectors()
    assert len(roots) == 24
    for new, left, right in f4.COMMUTATOR_TABLE:
        assert roots[new] == commutator(roots[left], roots[right])
    # the highest root is 2432
    assert all(not commutator(roots["2432"], roots[label]) for label in f4.SIMPLE_ROOTS)


def test_coroots_close_the_simple_root_sl2s(algebra):
    for label in f4.SIMPLE_ROOTS:
        h = algebra.matrix(algebra.element(f"H{label}"))
        e = f4.simple_root_matrix(label)
        assert commutator(e, transpose(e)) == h


def test_root_labels():
    assert f4.root_of("E1231") == (1, 2, 3, 1)
    assert f4.root_of("F0011") == (0, 0, -1, -1)
    assert f4.root_of("H1000") == (0, 0, 0, 0)


def test_label_tables():
    assert f4.resolve_label("E221", "corrected") == "E0221"
    assert f4.resolve_label("E221", "raw") == "E2210"
    assert f4.resolve_label("F111", "corrected") == "F0111"
    assert f4.resolve_label("E2432", "raw") == "E2432"
    with pytest.raises(ConfigError):
        f4.resolve_label("E221", "other")
    with pytest.raises(ConfigError):
        f4.resolve_label("E99", "corrected")


def test_printed_data_lives_in_f4(algebra):
    """Every printed combination resolves to an element of F4 of a single degree."""
    L1 = f4.combination(algebra, f4.TRIPLE_L1, "corrected")
    h = f4.combination(algebra, f4.TRIPLE_H, "corrected")
    f = f4.combination(algebra, f4.TRIPLE_F, "corrected")
    assert algebra.bracket(h, L1) == L1
    assert algebra.bracket(L1, f) == {k: 2 * c for k, c in h.items()}
    for table in (f4.HIGHEST_WEIGHT, f4.LOWEST_PARTS, f4.DUAL_BASIS):
        for terms in table.values():
            v = f4.combination(algebra, terms, "corrected")
            degrees = {algebra.bracket(h, {a: 1}).get(a, 0) for a in v}
            assert len(degrees) == 1


def test_printed_to_catalog_is_a_permutation():
    assert sorted(f4.PRINTED_TO_CATALOG.values()) == list(range(1, 9))
    assert all(f4.PRINTED_TO_CATALOG[i] == i for i in range(1, 5))
