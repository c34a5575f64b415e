import math

import pytest

from spanner_forge.config import ForgeSettings, OpenInterval, check_open_interval
from spanner_forge.exceptions import InputError

from fixtures import clean_settings


def test_defaults(clean_settings):
    values = clean_settings.as_dict()
    assert values["cluster_g"] == 29
    assert values["tolerance"] == 1e-9
    assert values["degree_threshold"] is None
    assert values["reduction"] == "rank"


def test_resolve(clean_settings):
    assert clean_settings.resolve("held_karp_cap", None) == 20
    assert clean_settings.resolve("held_karp_cap", 5) == 5


def test_override_restores(clean_settings):
    with clean_settings.override(cluster_g=8, reduction="keep-all"):
        assert clean_settings.get("cluster_g") == 8
        assert clean_settings.get("reduction") == "keep-all"
    assert clean_settings.get("cluster_g") == 29
    assert clean_settings.get("reduction") == "rank"


def test_override_validates(clean_settings):
    with pytest.raises(ValueError):
        with clean_settings.override(cluster_g=3):
            pass
    assert clean_settings.get("cluster_g") == 29
    with pytest.raises(InputError, match="Unknown settings"):
        with clean_settings.override(colour="red"):
            pass


def test_environment():
    settings = ForgeSettings(
        "env_settings",
        environ={
            "SPANNER_FORGE_THREADS": "8",
            "SPANNER_FORGE_CREDIT_SAFETY": "0.5",
            "SPANNER_FORGE_DEGREE_THRESHOLD": "none",
            "SPANNER_FORGE_REDUCTION": "keep-all",
        },
    )
    assert settings.get("threads") == 8
    assert settings.get("credit_safety") == 0.5
    assert settings.get("degree_threshold") is None
    assert settings.get("reduction") == "keep-all"


@pytest.mark.parametrize("raw", ["many", "0", "1000"])
def test_environment_errors(raw):
    with pytest.raises(InputError, match="SPANNER_FORGE_THREADS"):
        ForgeSettings("bad_settings", environ={"SPANNER_FORGE_THREADS": raw})


def test_open_interval():
    validator = OpenInterval(0, 1)
    validator.validate(0.5)
    with pytest.raises(ValueError):
        validator.validate(1.0)
    with pytest.raises(ValueError):
        validator.validate(math.nan)
    with pytest.raises(TypeError):
        validator.validate("0.5")


def test_check_open_interval():
    assert check_open_interval(1, 0, 2, "eps") == 1.0
    with pytest.raises(InputError, match="eps"):
        check_open_interval(0, 0, 1, "eps")
    with pytest.raises(InputError):
        check_open_interval(True, 0, 2)
