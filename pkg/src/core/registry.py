"""組件註冊機制"""

from typing import TYPE_CHECKING, Any, Dict, List, Type

from ..utils.exceptions import EngineNotFoundError, FragmenterNotFoundError

if TYPE_CHECKING:
    from ..config.settings import EngineConfig
    from ..engines.base import RetroEngine
    from ..fragmenters.base import Fragmenter


class ComponentRegistry:
    """組件註冊表 - 管理片段化器與搜尋引擎的註冊

    內建組件（brics_like、rbrics_like、fragment_retro、brute_force）在第一次
    查詢時才匯入，避免與引擎模組循環匯入。

    Args:
        load_builtins: 是否自動註冊內建組件
    """

    def __init__(self, load_builtins: bool = True):
        self.fragmenter_classes: Dict[str, Type["Fragmenter"]] = {}
        self.engine_classes: Dict[str, Type["RetroEngine"]] = {}
        self._builtins_pending = load_builtins

    def _ensure_builtins(self):
        if not self._builtins_pending:
            return
        self._builtins_pending = False
        from ..engines.fragment_retro import FragmentRetroEngine
        from ..fragmenters.rule_based import BricsLikeFragmenter, RBricsLikeFragmenter
        from ..oracle.brute_force import BruteForceEngine

        self.fragmenter_classes.setdefault("brics_like", BricsLikeFragmenter)
        self.fragmenter_classes.setdefault("rbrics_like", RBricsLikeFragmenter)
        self.engine_classes.setdefault("fragment_retro", FragmentRetroEngine)
        self.engine_classes.setdefault("brute_force", BruteForceEngine)

    def register_fragmenter(self, name: str, fragmenter_class: Type["Fragmenter"]):
        """註冊片段化器類

        Args:
            name: 模式名稱
            fragmenter_class: 片段化器類
        """
        self.fragmenter_classes[name] = fragmenter_class

    def register_engine(self, name: str, engine_class: Type["RetroEngine"]):
        """註冊搜尋引擎類

        Args:
            name: 引擎名稱
            engine_class: 引擎類
        """
        self.engine_classes[name] = engine_class

    def create_fragmenter(self, name: str, config: Dict[str, Any]) -> "Fragmenter":
        """創建片段化器實例

        Raises:
            FragmenterNotFoundError: 找不到指定的片段化器
        """
        self._ensure_builtins()
        if name not in self.fragmenter_classes:
            raise FragmenterNotFoundError(f"找不到片段化模式: {name}")
        return self.fragmenter_classes[name](config)

    def create_engine(self, name: str, config: "EngineConfig") -> "RetroEngine":
        """創建搜尋引擎實例

        Raises:
            EngineNotFoundError: 找不到指定的引擎
        """
        self._ensure_builtins()
        if name not in self.engine_classes:
            raise EngineNotFoundError(f"找不到搜尋引擎: {name}")
        return self.engine_classes[name](config)

    def list_fragmenters(self) -> List[str]:
        self._ensure_builtins()
        return list(self.fragmenter_classes.keys())

    def list_engines(self) -> List[str]:
        self._ensure_builtins()
        return list(self.engine_classes.keys())

    def is_fragmenter_registered(self, name: str) -> bool:
        self._ensure_builtins()
        return name in self.fragmenter_classes

    def is_engine_registered(self, name: str) -> bool:
        self._ensure_builtins()
        return name in self.engine_classes


# 全域註冊表實例
registry = ComponentRegistry()
