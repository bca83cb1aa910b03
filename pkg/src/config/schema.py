"""config.ini 各區段的型別化讀取類別；區段與鍵名對應 config/config.sample.ini"""

from configparser import SectionProxy


class ConfigSchema:
    """
    設定區段的基底類別，子類別以 @property 提供型別化的讀取。
    """
    SENSITIVE_KEYWORDS = ("password", "pwd", "token", "secret", "key")

    def __init__(self, config_section: SectionProxy) -> None:
        """
        參數：
            config_section (SectionProxy): 設定檔中的區段。
        """
        self._config_section = config_section

    def return_properties(self, return_type="list", mask_sensitive=True):
        """
        列出所有 @property 的名稱與值。

        參數：
            return_type (str): 'list' 或 'dict'。
            mask_sensitive (bool): 名稱含敏感關鍵字時遮罩其值。

        返回：
            list 或 dict
        """
        if return_type not in ("list", "dict"):
            raise ValueError("Invalid return_type. Must be 'list' or 'dict'.")

        values = {}
        for attr_name in sorted(dir(self.__class__)):
            if not isinstance(getattr(self.__class__, attr_name, None), property):
                continue
            try:
                value = getattr(self, attr_name)
            except Exception as e:
                value = "<Error: " + str(e) + ">"
            if mask_sensitive and any(k in attr_name.lower() for k in self.SENSITIVE_KEYWORDS):
                text = str(value)
                value = text[:2] + "*" * (len(text) - 4) + text[-2:] if len(text) > 4 else value
            values[attr_name] = value

        if return_type == "dict":
            return values
        return [str(name) + ": " + str(value) for name, value in values.items()]

# ---------- 區段 ----------
class DefaultSchema(ConfigSchema):
    """[default]"""
    def __init__(self, config_section: SectionProxy) -> None:
        super().__init__(config_section)

    @property
    def mode(self):
        return self._config_section.get('mode')
    @property
    def log_level(self):
        return self._config_section.get('log_level')
    @property
    def rules_dir(self):
        return self._config_section.get('rules_dir')

class EngineSchema(ConfigSchema):
    """[engine]"""
    def __init__(self, config_section: SectionProxy) -> None:
        super().__init__(config_section)

    @property
    def match_all(self):
        return self._config_section.getboolean('match_all')
    @property
    def max_solutions(self):
        return self._config_section.getint('max_solutions')
    @property
    def workers(self):
        return self._config_section.getint('workers')
    @property
    def screening(self):
        return self._config_section.getboolean('screening')
    @property
    def pruning(self):
        return self._config_section.getboolean('pruning')
    @property
    def use_priors(self):
        return self._config_section.getboolean('use_priors')
    @property
    def batch_size(self):
        return self._config_section.getint('batch_size')
    @property
    def max_stage(self):
        return self._config_section.getint('max_stage')

class ScreenSchema(ConfigSchema):
    """[screen]"""
    def __init__(self, config_section: SectionProxy) -> None:
        super().__init__(config_section)

    @property
    def nbits(self):
        return self._config_section.getint('nbits')
    @property
    def path_max(self):
        return self._config_section.getint('path_max')

class StockSchema(ConfigSchema):
    """[stock]"""
    def __init__(self, config_section: SectionProxy) -> None:
        super().__init__(config_section)

    @property
    def max_failure_ratio(self):
        return self._config_section.getfloat('max_failure_ratio')
    @property
    def build_workers(self):
        return self._config_section.getint('build_workers')

class OutputSchema(ConfigSchema):
    """[output]"""
    def __init__(self, config_section: SectionProxy) -> None:
        super().__init__(config_section)

    @property
    def sample_size(self):
        return self._config_section.getint('sample_size')
