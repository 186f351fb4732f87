import numpy as np
import pytest

from walgebra.config import settings
from walgebra.models.schemas import STAGES, PipelineConfig
from walgebra.services.catalog import lookup
from walgebra.services.pipeline import Pipeline

SEED = 20240601


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    """Stage cache in a temporary directory."""
    path = tmp_path / "cache"
    path.mkdir()
    monkeypatch.setattr(settings, "CACHE_DIR", path)
    return path


def make_config(orbit, cache_dir=None, **overrides) -> PipelineConfig:
    series, rank, label = orbit
    fields = dict(series=series, rank=rank, label=label, seed=SEED, use_cache=cache_dir is not None)
    if cache_dir is not None:
        fields["cache_dir"] = str(cache_dir)
    fields.update(overrides)
    return PipelineConfig(**fields)


@pytest.fixture(scope="session")
def staged():
    """Run an orbit through a stage prefix once per session; returns ``(state, report)``."""
    runs = {}

    def build(orbit, through="verify"):
        key = (tuple(orbit), through)
        if key not in runs:
            config = make_config(orbit, stages=list(STAGES[:STAGES.index(through) + 1]))
            pipeline = Pipeline(config)
            report = pipeline.run()
            runs[key] = (pipeline.state, report)
        return runs[key]

    return build


@pytest.fixture
def f4a2_orbit():
    return lookup("F", 4, "a2")


@pytest.fixture
def config_for():
    """``make_config`` as a fixture."""
    return make_config
