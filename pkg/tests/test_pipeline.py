import pytest

from walgebra.exceptions import ConfigError, UnsupportedOrbitError, WAlgebraError
from walgebra.models.schemas import STAGES
from walgebra.services import pipeline as pipeline_module
from walgebra.services.pipeline import Pipeline, run
from walgebra.services.serialization import load_artifact, stage_path

A2 = ("A", 2, "a0")


def test_input_hashes_chain(config_for):
    hashes = Pipeline(config_for(A2)).input_hashes()
    assert list(hashes) == list(STAGES)
    assert len(set(hashes.values())) == len(STAGES)
    other = Pipeline(config_for(A2, seed=1)).input_hashes()
    assert all(hashes[s] != other[s] for s in STAGES)
    prefix = Pipeline(config_for(A2, stages=["build", "sl2"])).input_hashes()
    assert prefix == {s: hashes[s] for s in ("build", "sl2")}


def test_output_format_does_not_change_hashes(config_for):
    text = Pipeline(config_for(A2, output_format="text")).input_hashes()
    json_ = Pipeline(config_for(A2, output_format="json")).input_hashes()
    assert text == json_


def test_bad_stage_prefix(config_for):
    with pytest.raises(ConfigError):
        config_for(A2, stages=["build", "slice"])
    with pytest.raises(ConfigError):
        config_for(A2, stages=[])


def test_bad_label_table(config_for):
    with pytest.raises(ConfigError):
        config_for(A2, label_table="printed")


def test_unknown_orbit(config_for):
    with pytest.raises(ConfigError):
        config_for(("A", 2, "a1"))


def test_unsupported_orbit_is_tagged(config_for):
    with pytest.raises(UnsupportedOrbitError) as info:
        run(config_for(("E", 8, "a7")))
    assert info.value.stage == "build"
    assert str(info.value).startswith("[build]")


def test_stage_error_is_tagged(config_for, monkeypatch):
    def broken(self):
        raise WAlgebraError("no kernel")

    monkeypatch.setattr(Pipeline, "cartan", broken)
    with pytest.raises(WAlgebraError) as info:
        run(config_for(A2, stages=["build", "sl2", "cartan"]))
    assert info.value.stage == "cartan"


def test_full_run_report(cache_dir, config_for):
    report = run(config_for(A2, cache_dir))
    assert report.passed, [c for c in report.certificates if not c.passed]
    assert report.orbit == "A2(a0)"
    assert report.stages == list(STAGES)
    assert report.recomputed == list(STAGES)
    assert report.charge == "1/3"
    assert report.det_omega1 == "-9"
    names = [c.name for c in report.certificates]
    assert len(names) == len(set(names))
    assert "catalog" in names and "frobenius_wdvv" in names
    for stage in STAGES:
        artifact = load_artifact(stage_path(cache_dir, "A2-a0", stage))
        assert artifact.stage == stage


def test_warm_cache_is_reused(cache_dir, config_for, monkeypatch):
    config = config_for(A2, cache_dir, stages=["build", "sl2", "cartan", "slice"])
    cold = run(config)
    before = {s: stage_path(cache_dir, "A2-a0", s).read_text(encoding="utf-8") for s in config.stages}

    def fail(self, stage, digest):
        raise AssertionError(f"stage {stage} recomputed")

    monkeypatch.setattr(Pipeline, "_run_stage", fail)
    warm = run(config)
    assert warm.recomputed == []
    assert warm.model_dump(exclude={"recomputed"}) == cold.model_dump(exclude={"recomputed"})
    after = {s: stage_path(cache_dir, "A2-a0", s).read_text(encoding="utf-8") for s in config.stages}
    assert after == before


def test_stale_entry_recomputes_everything(cache_dir, config_for):
    config = config_for(A2, cache_dir, stages=["build", "sl2", "cartan"])
    run(config)
    path = stage_path(cache_dir, "A2-a0", "sl2")
    path.write_text(path.read_text(encoding="utf-8").replace(Pipeline(config).input_hashes()["sl2"], "0" * 64), encoding="utf-8")
    again = run(config)
    assert again.recomputed == ["build", "sl2", "cartan"]


def test_corrupt_entry_recomputes(cache_dir, config_for):
    config = config_for(A2, cache_dir, stages=["build", "sl2"])
    run(config)
    stage_path(cache_dir, "A2-a0", "build").write_text("{", encoding="utf-8")
    assert run(config).recomputed == ["build", "sl2"]


def test_no_cache_writes_nothing(cache_dir, config_for):
    report = run(config_for(A2, stages=["build", "sl2"], use_cache=False, cache_dir=str(cache_dir)))
    assert report.recomputed == ["build", "sl2"]
    assert not any(cache_dir.iterdir())


def test_certificate_helper_logs_failures(caplog):
    result = pipeline_module.certificate("demo", ["(1,2)"], "detail")
    assert not result.passed and result.failures == ["(1,2)"]
    assert "Certificate demo failed" in caplog.text
    assert pipeline_module.certificate("demo", []).passed
