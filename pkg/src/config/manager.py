"""config.ini 的設定管理器：尋找設定檔、讀取並以 schema 類別提供各區段"""

import configparser
import os

from loguru import logger

from .schema import (
    DefaultSchema,
    EngineSchema,
    ScreenSchema,
    StockSchema,
    OutputSchema,
)

SECTIONS = ("default", "engine", "screen", "stock", "output")


def find_config_path(filename="config.ini", max_depth=5):
    """
    從當前工作目錄向上尋找設定檔，依序檢查
    'filename'、'config/filename'、'conf/filename'。

    參數：
        filename (str): 設定檔名稱。
        max_depth (int): 最多往上幾層。

    返回：
        str 或 None
    """
    path = os.path.abspath(".")
    for _ in range(max_depth):
        for candidate in (
            os.path.join(path, filename),
            os.path.join(path, "config", filename),
            os.path.join(path, "conf", filename),
        ):
            if os.path.exists(candidate):
                return candidate
        parent = os.path.dirname(path)
        if parent == path:
            break
        path = parent
    return None


class ConfigManager(object):
    """
    設定管理器（單例）。

    批次命令列程式沒有常駐行程，所以不監看設定檔變更；
    需要重新讀取時呼叫 reload_config()，測試中用 reset() 丟棄單例。
    """
    _instance = None
    _initialized = False

    def __new__(cls, *args, **kwargs):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self, config_path: str = None):
        if self._initialized:
            if config_path and os.path.abspath(config_path) != os.path.abspath(self.config_path):
                logger.warning(
                    f"ConfigManager 已使用 '{self.config_path}'，忽略新的路徑 '{config_path}'"
                )
            return

        self.config_path = config_path or find_config_path()
        if not self.config_path or not os.path.exists(self.config_path):
            raise FileNotFoundError(
                "Could not find config.ini. Please provide the path explicitly "
                "to ConfigManager(config_path='/path/to/your/config.ini') "
                "or place it in the project root or a 'config/' subdirectory."
            )

        logger.debug(f"ConfigManager 使用設定檔: {self.config_path}")
        self._config = configparser.RawConfigParser()
        self._load_config()
        self._initialized = True

    def _load_config(self):
        self._config.read(self.config_path, encoding='utf-8')
        for section in SECTIONS:
            if not self._config.has_section(section):
                self._config.add_section(section)
        self.default = DefaultSchema(self._config['default'])
        self.engine = EngineSchema(self._config['engine'])
        self.screen = ScreenSchema(self._config['screen'])
        self.stock = StockSchema(self._config['stock'])
        self.output = OutputSchema(self._config['output'])

    def reload_config(self):
        new_config = configparser.RawConfigParser()
        new_config.read(self.config_path, encoding='utf-8')
        self._config = new_config
        self._load_config()
        logger.debug("設定已重新載入")

    @classmethod
    def reset(cls):
        cls._instance = None
        cls._initialized = False
