import json

import pytest

from walgebra.services import golden
from walgebra.services.symcore import ONE, GradedRing, rat


@pytest.fixture(scope="module")
def reference():
    return golden.load_reference()


def test_printed_catalog_matches_generated_rows():
    assert golden.catalog_failures() == []


def test_missing_catalog_file(tmp_path):
    failures = golden.catalog_failures(tmp_path / "absent.json")
    assert len(failures) == 1 and failures[0].startswith("missing")


def test_tampered_catalog_row(tmp_path):
    rows = json.loads(golden.catalog_path().read_text(encoding="utf-8"))
    rows[0]["exponents"] = [1, 1, 1]
    rows.append({"name": "E9(a1)", "exponents": [1], "extra_weights": [], "printed_shifts": [0]})
    path = tmp_path / "catalog.json"
    path.write_text(json.dumps(rows), encoding="utf-8")
    failures = golden.catalog_failures(path)
    assert f"{rows[0]['name']}: weights" in failures
    assert "E9(a1) missing from the catalog" in failures


def test_reference_shape(reference):
    assert reference["orbit"] == "F4(a2)"
    assert reference["weights"]["s"] == [2, 2, 6, 6]
    assert rat(reference["charge"]) == rat("2/3")


def test_reference_potential_is_a_frobenius_potential(reference):
    checks = golden.reference_failures(reference, full=False)
    assert {k: v for k, v in checks.items() if v} == {}


@pytest.mark.slow
def test_reference_potential_full_wdvv(reference):
    checks = golden.reference_failures(reference, full=True)
    assert checks["wdvv"] == []


def test_reference_potential_degrees(reference):
    pot = golden.reference_potential(reference)
    assert pot.r == 4
    assert pot.ring.aux_names == (golden.REFERENCE_NAME,)
    assert pot.degrees == [rat(d) for d in reference["degrees"]]


def test_printed_positions():
    assert golden.printed_positions(4) == {1: 0, 2: 1, 3: 2, 4: 3, 5: 7, 6: 6, 7: 5, 8: 4}
    swapped = golden.printed_positions(4, [0, 2, 1, 3])
    assert swapped[2] == 2 and swapped[3] == 1
    assert swapped[5] == 7


def test_proportionality():
    ring = GradedRing(["x", "y"], [1, 1])
    x, y = ring.gen("x"), ring.gen("y")
    assert golden.proportionality(x ** 2 * y * 3, x ** 2 * y) == 3
    assert golden.proportionality(x + y, x) is None
    assert golden.proportionality(ring.zero, ring.zero) == ONE
    assert golden.proportionality(x, ring.zero) is None


def test_parse_renamed():
    ring = GradedRing(["a", "b"], [1, 2])
    p = golden.parse_renamed("z1 + 2*z2**2", ring, {"z1": "b", "z2": "a"})
    assert p == ring.gen("b") + ring.gen("a") ** 2 * 2
