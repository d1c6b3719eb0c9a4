import pytest
from pydantic import ValidationError

from comb_cluster import get_settings
from comb_cluster.settings import Settings


def test_defaults(monkeypatch):
    for name in ("DENSE_MODE_LIMIT", "REL_THRESHOLD", "MC_Z_LIMIT", "SAMPLE_CHUNK", "LOG_LEVEL"):
        monkeypatch.delenv(f"COMB_CLUSTER_{name}", raising=False)
    settings = Settings(_env_file=None)
    assert settings.DENSE_MODE_LIMIT == 512
    assert settings.REL_THRESHOLD == 1e-6
    assert settings.NULLIFIER_TOLERANCE == 1e-10
    assert settings.MC_Z_LIMIT == 5.0
    assert settings.SAMPLE_CHUNK == 4096
    assert settings.SAMPLE_WORKERS == 1
    assert settings.LOG_LEVEL == "INFO"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("COMB_CLUSTER_DENSE_MODE_LIMIT", "64")
    monkeypatch.setenv("COMB_CLUSTER_JSON_LOGS", "true")
    settings = get_settings()
    assert settings.DENSE_MODE_LIMIT == 64
    assert settings.JSON_LOGS is True
    assert get_settings() is settings


def test_field_names_work_as_keywords():
    assert Settings(SAMPLE_CHUNK=7).SAMPLE_CHUNK == 7


@pytest.mark.parametrize(
    "name, value", [("REL_THRESHOLD", "1.5"), ("SAMPLE_CHUNK", "0"), ("MC_Z_LIMIT", "-1")]
)
def test_invalid_values_are_rejected(monkeypatch, name, value):
    monkeypatch.setenv(f"COMB_CLUSTER_{name}", value)
    with pytest.raises(ValidationError):
        Settings()
