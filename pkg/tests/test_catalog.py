import pytest

from walgebra.exceptions import ConfigError
from walgebra.services.catalog import catalog, catalog_json, compute_shifts, describe, find, lookup, parse_orbit


def test_every_row_satisfies_the_duality_laws():
    rows = catalog()
    assert len(rows) > 40
    for row in rows:
        assert row.violations() == [], row.name


def test_e8_a7():
    row = lookup("E", 8, "a7")
    assert row.exponents == [1, 1, 1, 1, 5, 5, 5, 5]
    assert row.shifts == [0, 1, 1, 2, 2, 3, 3, 4]
    assert row.n == 40
    assert not row.realized


def test_b4_a2_records_the_printed_shifts():
    row = lookup("B", 4, "a2")
    assert row.exponents == [1, 1, 3, 3]
    assert row.extra_weights == [1, 1, 2, 2]
    assert row.shifts == [0, 0, 1, 1]
    assert row.printed_shifts == [0, 0, 0, 1]
    assert row.n == 8


def test_f4_a2():
    row = lookup("F", 4, "a2")
    assert row.name == "F4(a2)"
    assert row.weights == [1, 1, 5, 5, 1, 2, 3, 4]
    assert row.shifts == [0, 0, 1, 1]
    assert row.eta_r == 5
    assert row.realized
    assert row.printed_shifts is None


def test_compute_shifts():
    assert compute_shifts([1, 7, 11, 13, 17, 19, 23, 29], [1, 2, 4, 7, 8, 11, 13, 14]) == [0, 0, 0, 0, 1, 1, 1, 1]


@pytest.mark.parametrize(
    "text, expected",
    [
        ("F4(a2)", ("F", 4, "a2")),
        ("F4 a2", ("F", 4, "a2")),
        ("f4 A2", ("F", 4, "a2")),
        ("B 4 a2", ("B", 4, "a2")),
        ("A 2", ("A", 2, "a0")),
        ("E8", ("E", 8, "a0")),
    ],
)
def test_parse_orbit(text, expected):
    assert parse_orbit(text) == expected


@pytest.mark.parametrize("text", ["", "F4 a2 extra words", "X? a1"])
def test_parse_orbit_rejects(text):
    with pytest.raises(ConfigError):
        parse_orbit(text)


def test_unknown_orbits():
    with pytest.raises(ConfigError):
        lookup("F", 4, "a9")
    with pytest.raises(ConfigError):
        lookup("G", 3, "a0")
    assert find("F4 a9") is None
    assert find("D4(a1)").extra_weights == [1, 2]


def test_describe_and_json():
    text = describe(lookup("F", 4, "a2"))
    assert "F4(a2) in F4 (dim 52)" in text
    assert "extra weights:  1, 2, 3, 4" in text
    assert "printed shifts" in describe(lookup("B", 4, "a2"))
    rows = catalog_json()
    names = [row["name"] for row in rows]
    assert "E8(a7)" in names and "A1(a0)" in names
    assert {name for name in names if name.startswith("F4")} == {"F4(a0)", "F4(a1)", "F4(a2)", "F4(a3)"}
