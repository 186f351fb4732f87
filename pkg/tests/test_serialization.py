import pytest

from walgebra.exceptions import CacheError
from walgebra.models.schemas import StageArtifact
from walgebra.services.algebraic import AlgebraicFn, AlgebraicRing
from walgebra.services.serialization import (
    canonical_json,
    content_hash,
    fn_text,
    load_artifact,
    poly_text,
    rat_list,
    read_artifact,
    stage_path,
    write_artifact,
)
from walgebra.services.symcore import GradedRing, rat


def artifact(digest="abc"):
    return StageArtifact(stage="slice", input_hash=digest, payload={"b": [1, 2], "a": {"y": "1/2", "x": "3"}}, elapsed=1.25)


def test_canonical_json_ignores_key_order():
    assert canonical_json({"b": 1, "a": [1, {"d": 2, "c": 3}]}) == '{"a":[1,{"c":3,"d":2}],"b":1}'
    assert content_hash({"x": 1, "y": 2}) == content_hash({"y": 2, "x": 1})
    assert content_hash({"x": 1}) != content_hash({"x": 2})
    assert len(content_hash({})) == 64


def test_stage_path(tmp_path):
    assert stage_path(tmp_path, "F4-a2", "ds") == tmp_path / "F4-a2" / "ds.json"


def test_write_then_load(tmp_path):
    path = stage_path(tmp_path, "A2-a0", "slice")
    write_artifact(path, artifact())
    assert load_artifact(path) == artifact()
    assert [p.name for p in path.parent.iterdir()] == ["slice.json"]


def test_rewrite_replaces_file(tmp_path):
    path = tmp_path / "stage.json"
    write_artifact(path, artifact("old"))
    write_artifact(path, artifact("new"))
    assert load_artifact(path).input_hash == "new"
    assert sorted(p.name for p in tmp_path.iterdir()) == ["stage.json"]


def test_read_artifact_checks_hash(tmp_path):
    path = tmp_path / "stage.json"
    write_artifact(path, artifact("abc"))
    assert read_artifact(path, "abc") == artifact("abc")
    assert read_artifact(path, "def") is None
    assert read_artifact(tmp_path / "missing.json", "abc") is None


@pytest.mark.parametrize("content", ["{not json", '{"stage": "slice"}', "[]"])
def test_corrupt_entries(tmp_path, content):
    path = tmp_path / "stage.json"
    path.write_text(content, encoding="utf-8")
    assert read_artifact(path, "abc") is None
    with pytest.raises(CacheError):
        load_artifact(path)


def test_load_missing_artifact(tmp_path):
    with pytest.raises(CacheError):
        load_artifact(tmp_path / "missing.json")


def test_value_encoders():
    ring = GradedRing(["x", "y"], [1, 2])
    x, y = ring.gen("x"), ring.gen("y")
    assert poly_text(ring.zero) == "0"
    assert poly_text(x ** 2 + y) == "x**2 + y"
    assert rat_list([rat(1), rat("-3/4")]) == ["1", "-3/4"]
    alg = AlgebraicRing(["x"], [1])
    assert fn_text(alg.gen("x")) == "x"
    assert fn_text(AlgebraicFn(alg, alg.full.one, alg.full.gen("x"))) == "(1)/(x)"
