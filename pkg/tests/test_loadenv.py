from argparse import Namespace

import pytest

from loadenv import DEFAULT_MAX_GROUP_ORDER, DEFAULT_SCAN_CHUNK, ConfigError, RunConfig, build_config, load_env


def args(**kw):
    base = {"command": "class3", "q": 2, "triple": "all", "format": "summary", "output": None, "large": False}
    base.update(kw)
    return Namespace(**base)


def test_defaults():
    cfg = build_config(args(), env={})
    assert cfg.allow_large is False
    assert cfg.max_group_order == DEFAULT_MAX_GROUP_ORDER
    assert cfg.scan_chunk == DEFAULT_SCAN_CHUNK
    assert cfg.triple == "all"


def test_triple_index_parsed():
    assert build_config(args(triple="1"), env={}).triple == 1
    with pytest.raises(ConfigError):
        build_config(args(triple="first"), env={})
    with pytest.raises(ConfigError):
        build_config(args(triple="-1"), env={})


def test_env_knobs():
    env = {"TRIALITY_ALLOW_LARGE": "yes", "TRIALITY_MAX_GROUP_ORDER": "2_000_000", "TRIALITY_SCAN_CHUNK": "4096"}
    cfg = build_config(args(), env=env)
    assert cfg.allow_large
    assert cfg.max_group_order == 2_000_000
    assert cfg.scan_chunk == 4096


@pytest.mark.parametrize("value", ["abc", "0", "-5"])
def test_bad_env_values(value):
    with pytest.raises(ConfigError):
        build_config(args(), env={"TRIALITY_SCAN_CHUNK": value})


def test_validate():
    with pytest.raises(ConfigError):
        RunConfig("plot", 2).validate()
    with pytest.raises(ConfigError):
        RunConfig("hexagon", 2, mode="twisted").validate()
    with pytest.raises(ConfigError):
        RunConfig("hexagon", 2, output_format="yaml").validate()


def test_load_env_reads_dotenv(tmp_path, monkeypatch):
    monkeypatch.delenv("TRIALITY_SCAN_CHUNK", raising=False)
    dotenv = tmp_path / ".env"
    dotenv.write_text("TRIALITY_SCAN_CHUNK=1024\n")
    found = load_env(str(dotenv))
    assert found["TRIALITY_SCAN_CHUNK"] == "1024"
    monkeypatch.delenv("TRIALITY_SCAN_CHUNK")


def test_load_env_missing_file(tmp_path):
    assert isinstance(load_env(str(tmp_path / "missing.env")), dict)
