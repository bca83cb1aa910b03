"""測試設定檔與引擎設定"""

import configparser
from pathlib import Path

import pytest

from src.config.manager import SECTIONS, ConfigManager, find_config_path
from src.config.settings import EngineConfig, load_settings
from src.utils.exceptions import ConfigurationError

SAMPLE_INI = Path(__file__).resolve().parents[2] / "config" / "config.sample.ini"

CUSTOM_INI = """[default]
mode = rbrics_like
log_level = DEBUG

[engine]
max_solutions = 50
workers = 3
use_priors = false

[screen]
nbits = 1024
"""


def _write_ini(tmp_path, text=CUSTOM_INI):
    path = tmp_path / "config.ini"
    path.write_text(text, encoding="utf-8")
    return path


class TestEngineConfig:
    """測試 EngineConfig"""

    def test_defaults(self):
        config = EngineConfig()
        assert config.mode == "brics_like"
        assert (config.nbits, config.path_max) == (2048, 7)
        assert config.match_all and config.screening and config.pruning
        assert config.max_solutions == 10000
        assert config.max_stage == 0

    @pytest.mark.parametrize("nbits", [0, 100, -64])
    def test_nbits_must_be_multiple_of_64(self, nbits):
        with pytest.raises(ValueError):
            EngineConfig(nbits=nbits)

    def test_unknown_field(self):
        with pytest.raises(ValueError):
            EngineConfig(threads=4)

    def test_priors_need_all_matches(self):
        assert EngineConfig().priors_enabled
        assert not EngineConfig(match_all=False).priors_enabled
        assert not EngineConfig(use_priors=False).priors_enabled

    def test_frozen_copy(self):
        config = EngineConfig()
        updated = config.model_copy(update={"workers": 4})
        assert updated.workers == 4 and config.workers == 1


class TestLoadSettings:
    """測試 load_settings 與 ConfigManager"""

    def test_custom_file(self, tmp_path):
        manager = load_settings(str(_write_ini(tmp_path)))
        config = EngineConfig.from_manager(manager)
        assert config.mode == "rbrics_like"
        assert config.max_solutions == 50
        assert config.workers == 3
        assert not config.use_priors
        assert config.nbits == 1024
        # 沒寫的鍵使用預設值
        assert config.path_max == 7 and config.batch_size == 256
        assert manager.default.log_level == "DEBUG"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_settings(str(tmp_path / "nope.ini"))

    def test_invalid_value(self, tmp_path):
        manager = load_settings(str(_write_ini(tmp_path, "[screen]\nnbits = 100\n")))
        with pytest.raises(ConfigurationError):
            EngineConfig.from_manager(manager)

    def test_unparseable_value(self, tmp_path):
        manager = load_settings(str(_write_ini(tmp_path, "[engine]\nworkers = many\n")))
        with pytest.raises(ConfigurationError):
            EngineConfig.from_manager(manager)

    def test_no_manager(self):
        assert EngineConfig.from_manager(None) == EngineConfig()

    def test_find_config_path(self, tmp_path, monkeypatch):
        (tmp_path / "config").mkdir()
        _write_ini(tmp_path / "config")
        nested = tmp_path / "a" / "b"
        nested.mkdir(parents=True)
        monkeypatch.chdir(nested)
        assert find_config_path() == str(tmp_path / "config" / "config.ini")

    def test_singleton(self, tmp_path):
        path = str(_write_ini(tmp_path))
        assert ConfigManager(path) is ConfigManager()
        ConfigManager.reset()
        assert not ConfigManager._initialized

    def test_reload(self, tmp_path):
        path = _write_ini(tmp_path)
        manager = ConfigManager(str(path))
        path.write_text("[engine]\nworkers = 5\n", encoding="utf-8")
        manager.reload_config()
        assert manager.engine.workers == 5
        assert manager.default.mode is None


class TestSchemaCoverage:
    """schema 類別為手寫，須涵蓋範例設定檔的每個鍵"""

    def setup_method(self):
        self.sample = configparser.RawConfigParser()
        self.sample.read(SAMPLE_INI, encoding="utf-8")

    def test_sections(self):
        assert tuple(self.sample.sections()) == SECTIONS

    def test_every_key_has_property(self):
        manager = ConfigManager(str(SAMPLE_INI))
        for section in SECTIONS:
            schema = getattr(manager, section)
            for key in self.sample[section]:
                assert isinstance(getattr(type(schema), key, None), property), f"[{section}] {key}"

    def test_sample_values_load(self):
        config = EngineConfig.from_manager(ConfigManager(str(SAMPLE_INI)))
        assert config == EngineConfig()
