from scripts.utils import cache_entries, clean_cache
from walgebra.models.schemas import StageArtifact
from walgebra.services.serialization import stage_path, write_artifact


def populate(root):
    for key in ("A2-a0", "F4-a2"):
        for stage in ("build", "sl2"):
            write_artifact(stage_path(root, key, stage), StageArtifact(stage=stage, input_hash="h"))
    (root / "F4-a2" / ".ds-123.tmp").write_text("partial", encoding="utf-8")


def test_cache_entries(tmp_path):
    populate(tmp_path)
    assert cache_entries(tmp_path) == {"A2-a0": ["build", "sl2"], "F4-a2": ["build", "sl2"]}
    assert cache_entries(tmp_path / "absent") == {}


def test_clean_stale_only(tmp_path):
    populate(tmp_path)
    assert clean_cache(tmp_path, stale_only=True) == 1
    assert cache_entries(tmp_path)["F4-a2"] == ["build", "sl2"]


def test_clean_one_orbit(tmp_path):
    populate(tmp_path)
    assert clean_cache(tmp_path, "F4-a2") == 2
    assert list(cache_entries(tmp_path)) == ["A2-a0"]
