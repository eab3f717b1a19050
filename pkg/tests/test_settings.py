import pytest

from cybundle import defaults
from cybundle.errors import ConfigError
from cybundle.settings import SolverOptions, build_settings, flatten_settings, load_options, read_config


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv(defaults.SEARCH_RADIUS_ENV, raising=False)


def write_config(tmp_path, text: str) -> str:
    path = tmp_path / "config.yml"
    path.write_text(text)
    return str(path)


def test_defaults_without_config_file(tmp_path):
    options = load_options(str(tmp_path / "missing.yml"))
    assert options == SolverOptions()
    assert options.search_radius == defaults.SEARCH_RADIUS


def test_config_file_values(tmp_path):
    path = write_config(
        tmp_path,
        "solver:\n  search_radius: 5\n  pic0_samples: 3\noutput:\n  format: json\n  canonical: false\n",
    )
    options = load_options(path)
    assert options.search_radius == 5
    assert options.pic0_samples == 3
    assert options.max_candidates == defaults.SEARCH_MAX_CANDIDATES
    assert options.output_format == "json"
    assert options.canonical is False


def test_candidate_cap_from_config(tmp_path):
    assert load_options(write_config(tmp_path, "solver:\n  max_candidates: 12\n")).max_candidates == 12


def test_precedence_flag_env_file(tmp_path, monkeypatch):
    path = write_config(tmp_path, "solver:\n  search_radius: 5\n")
    assert load_options(path).search_radius == 5
    monkeypatch.setenv(defaults.SEARCH_RADIUS_ENV, "7")
    assert load_options(path).search_radius == 7
    assert load_options(path, search_radius=9).search_radius == 9
    assert load_options(path, output_format="json").output_format == "json"


def test_unparseable_env_value_is_ignored(tmp_path, monkeypatch):
    monkeypatch.setenv(defaults.SEARCH_RADIUS_ENV, "wide")
    assert load_options(str(tmp_path / "missing.yml")).search_radius == defaults.SEARCH_RADIUS


@pytest.mark.parametrize(
    "text",
    [
        "solver:\n  search_radius: -1\n",
        "solver:\n  search_radius: ten\n",
        "solver:\n  max_candidates: 0\n",
        "output:\n  format: xml\n",
        "output:\n  canonical: maybe\n",
        "logging: debug\n",
        "- just\n- a list\n",
        "solver: [unclosed\n",
    ],
)
def test_bad_config_values(tmp_path, text):
    with pytest.raises(ConfigError):
        load_options(write_config(tmp_path, text))


def test_bad_flag_value(tmp_path):
    with pytest.raises(ConfigError):
        load_options(str(tmp_path / "missing.yml"), search_radius=-4)


def test_unknown_keys_are_ignored(tmp_path):
    path = write_config(tmp_path, "solver:\n  turbo: true\nextras:\n  a: 1\n")
    assert load_options(path) == SolverOptions()


def test_empty_config_file(tmp_path):
    assert read_config(write_config(tmp_path, "")) == {}


def test_settings_tree():
    settings = build_settings(SolverOptions())
    assert [s.id for s in settings] == ["solver", "output", "logging"]
    ids = [s.id for s in flatten_settings(settings)]
    assert ids == ["search_radius", "max_candidates", "pic0_samples", "sample_seed", "format", "canonical", "level"]
