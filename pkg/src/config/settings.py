"""搜尋引擎設定（pydantic）"""

from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..utils.exceptions import ConfigurationError
from .manager import ConfigManager, find_config_path


class EngineConfig(BaseModel):
    """引擎設定；預設值來自 config.ini，命令列旗標以 model_copy(update=...) 覆寫"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: str = "brics_like"
    rules_path: Optional[str] = None
    rules_dir: Optional[str] = None
    nbits: int = 2048
    path_max: int = Field(default=7, ge=0)
    match_all: bool = True
    max_solutions: int = Field(default=10000, ge=1)
    workers: int = Field(default=1, ge=1)
    screening: bool = True
    pruning: bool = True
    use_priors: bool = True
    batch_size: int = Field(default=256, ge=1)
    max_stage: int = Field(default=0, ge=0)

    @field_validator("nbits")
    @classmethod
    def _nbits_multiple_of_64(cls, value: int) -> int:
        if value <= 0 or value % 64:
            raise ValueError("nbits 必須是 64 的正整數倍")
        return value

    @property
    def priors_enabled(self) -> bool:
        """只在記錄全部命中時才能用交集當先驗"""
        return self.use_priors and self.match_all

    def fragmenter_config(self) -> Dict[str, Any]:
        return {"rules_path": self.rules_path, "rules_dir": self.rules_dir}

    @classmethod
    def from_manager(cls, manager: Optional[ConfigManager]) -> "EngineConfig":
        """以設定檔的值建立；缺少的鍵使用預設值"""
        if manager is None:
            return cls()
        try:
            values = {
                "mode": manager.default.mode,
                "rules_dir": manager.default.rules_dir,
                "nbits": manager.screen.nbits,
                "path_max": manager.screen.path_max,
                "match_all": manager.engine.match_all,
                "max_solutions": manager.engine.max_solutions,
                "workers": manager.engine.workers,
                "screening": manager.engine.screening,
                "pruning": manager.engine.pruning,
                "use_priors": manager.engine.use_priors,
                "batch_size": manager.engine.batch_size,
                "max_stage": manager.engine.max_stage,
            }
            return cls(**{k: v for k, v in values.items() if v not in (None, "")})
        except ValueError as e:
            raise ConfigurationError(f"設定檔 {manager.config_path} 內容無效: {str(e)}")


def load_settings(config_path: Optional[str] = None) -> Optional[ConfigManager]:
    """載入設定檔；找不到時回傳 None，呼叫端改用預設值"""
    path = config_path or find_config_path()
    if path is None:
        return None
    try:
        return ConfigManager(path)
    except FileNotFoundError as e:
        raise ConfigurationError(str(e))
    except Exception as e:
        raise ConfigurationError(f"無法讀取設定檔 {path}: {str(e)}")
