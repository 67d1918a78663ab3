from pathlib import Path

from spheregate import config


def test_axioms_path_precedence(monkeypatch, tmp_path):
    monkeypatch.delenv("SPHEREGATE_AXIOMS", raising=False)
    assert config.axioms_path() == config.DEFAULT_AXIOMS_PATH
    monkeypatch.setenv("SPHEREGATE_AXIOMS", str(tmp_path / "env.json"))
    assert config.axioms_path() == tmp_path / "env.json"
    assert config.axioms_path(str(tmp_path / "flag.json")) == tmp_path / "flag.json"


def test_bundled_files_exist():
    assert config.DEFAULT_AXIOMS_PATH.exists()
    assert config.bundled_manifest("witnesses").exists()
    assert config.bundled_manifest("witnesses.json") == config.bundled_manifest("witnesses")


def test_integer_environment_values(monkeypatch):
    monkeypatch.setenv("SPHEREGATE_TEST_CAP", "42")
    assert config._int_env("SPHEREGATE_TEST_CAP", 7) == 42
    monkeypatch.setenv("SPHEREGATE_TEST_CAP", "lots")
    assert config._int_env("SPHEREGATE_TEST_CAP", 7) == 7
    monkeypatch.delenv("SPHEREGATE_TEST_CAP")
    assert config._int_env("SPHEREGATE_TEST_CAP", 7) == 7


def test_rule_ids():
    assert config.RULE_IDS_SPHERE4[0] == "R-RANK"
    assert set(config.RULE_IDS_SPHERE3) == {"R-RANK3", "R-META3", "R-TABLE3"}
    assert isinstance(config.CONTEXT_DIR, Path)
