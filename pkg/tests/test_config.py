import pytest

from config import Config

OVERRIDDEN = ("GENERATIONS", "GA_MUTATION_RATE", "FML_STRICT", "SERVICE_BIND")


@pytest.fixture
def clean_env(monkeypatch):
    # setenv first so monkeypatch restores whatever load_dotenv overwrites
    for name in OVERRIDDEN:
        monkeypatch.setenv(name, "")
        monkeypatch.delenv(name)
    return monkeypatch


def test_defaults(clean_env):
    settings = Config()
    assert settings.GENERATIONS == 300
    assert settings.COG_SAMPLES == 1001
    assert settings.FML_STRICT is True
    assert settings.validate() == []


def test_environment_overrides(clean_env):
    clean_env.setenv("GENERATIONS", "12")
    clean_env.setenv("FML_STRICT", "no")
    settings = Config()
    assert settings.GENERATIONS == 12
    assert settings.FML_STRICT is False


def test_load_file(clean_env, tmp_path):
    path = tmp_path / "experiment.env"
    path.write_text("GENERATIONS=7\nGA_MUTATION_RATE=0.3\nSERVICE_BIND=0.0.0.0:9000\n")
    settings = Config()
    settings.load_file(str(path))
    assert settings.GENERATIONS == 7
    assert settings.GA_MUTATION_RATE == 0.3
    assert settings.parse_bind(settings.SERVICE_BIND) == ("0.0.0.0", 9000)
    with pytest.raises(FileNotFoundError):
        settings.load_file(str(tmp_path / "missing.env"))


def test_validate_reports_problems(clean_env):
    clean_env.setenv("GA_MUTATION_RATE", "1.5")
    problems = Config().validate()
    assert len(problems) == 1
    assert "GA_MUTATION_RATE" in problems[0]


@pytest.mark.parametrize("bind", ["7855", "localhost:", ":80", "host:port", None])
def test_parse_bind_rejects(bind):
    with pytest.raises(ValueError):
        Config.parse_bind(bind)
