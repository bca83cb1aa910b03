"""候選建構塊篩選管線"""

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Dict, List

import numpy as np

from ..utils.exceptions import MatchingError

if TYPE_CHECKING:
    from ..matching.screen import QueryProfile
    from ..stock.stock import Stock


class CandidateFilter(ABC):
    """候選篩選器抽象基類；不可排除任何真正匹配的建構塊"""

    @property
    @abstractmethod
    def name(self) -> str:
        """返回篩選器名稱"""
        pass

    @abstractmethod
    def apply(self, profile: "QueryProfile", stock: "Stock", ids: np.ndarray) -> np.ndarray:
        """篩選候選 id

        Args:
            profile: 查詢片段的量測與指紋
            stock: 庫存
            ids: 遞增排列的候選 id（int64）

        Returns:
            保留的 id，維持原順序
        """
        pass


class PropertyFilter(CandidateFilter):
    """重原子數與環數不少於查詢片段"""

    @property
    def name(self) -> str:
        return "property"

    def apply(self, profile, stock, ids):
        keep = (stock.heavy[ids] >= profile.heavy_atoms) & (stock.rings[ids] >= profile.rings)
        return ids[keep]


class FingerprintFilter(CandidateFilter):
    """查詢指紋的每個位元都必須出現在建構塊指紋中"""

    @property
    def name(self) -> str:
        return "fingerprint"

    def apply(self, profile, stock, ids):
        if profile.fp.nbits != stock.nbits or profile.fp.path_max != stock.path_max:
            raise MatchingError("查詢指紋參數與庫存不一致")
        query = profile.fp.bits
        rows = stock.fp_matrix[ids]
        keep = np.all((rows & query) == query, axis=1)
        return ids[keep]


class ScreenPipeline:
    """篩選管線 - 篩選器鏈"""

    def __init__(self, filters: List[CandidateFilter]):
        """初始化篩選管線

        Args:
            filters: 篩選器列表（按執行順序）
        """
        self.filters = filters
        self.last_rejections: Dict[str, int] = {}

    def apply(self, profile: "QueryProfile", stock: "Stock", ids: np.ndarray) -> np.ndarray:
        """依序套用所有篩選器

        每個篩選器排除的數量記錄在 last_rejections。

        Raises:
            MatchingError: 篩選過程中發生錯誤
        """
        rejections: Dict[str, int] = {}
        try:
            result = ids
            for candidate_filter in self.filters:
                before = len(result)
                result = candidate_filter.apply(profile, stock, result)
                rejections[candidate_filter.name] = before - len(result)
        except MatchingError:
            raise
        except Exception as e:
            raise MatchingError(f"篩選管線執行失敗: {str(e)}")
        self.last_rejections = rejections
        return result

    def __len__(self) -> int:
        """返回管線中篩選器的數量"""
        return len(self.filters)

    def __str__(self) -> str:
        if not self.filters:
            return "Empty Pipeline"
        return f"Pipeline: {' -> '.join(f.name for f in self.filters)}"


class ScreenPipelineManager:
    """篩選管線管理器"""

    def __init__(self):
        self.registered_filters: Dict[str, CandidateFilter] = {}

    def register_filter(self, candidate_filter: CandidateFilter):
        """註冊篩選器

        Args:
            candidate_filter: 篩選器實例
        """
        self.registered_filters[candidate_filter.name] = candidate_filter

    def get_filter(self, name: str) -> CandidateFilter:
        """獲取篩選器

        Raises:
            MatchingError: 找不到指定的篩選器
        """
        if name not in self.registered_filters:
            raise MatchingError(f"找不到篩選器: {name}")
        return self.registered_filters[name]

    def create_pipeline(self, filter_names: List[str]) -> ScreenPipeline:
        """依名稱列表建立管線；空列表得到不篩選的管線"""
        return ScreenPipeline([self.get_filter(name) for name in filter_names])

    def list_filters(self) -> List[str]:
        return list(self.registered_filters.keys())

    def is_registered(self, name: str) -> bool:
        return name in self.registered_filters


DEFAULT_FILTERS = ["property", "fingerprint"]

pipeline_manager = ScreenPipelineManager()
pipeline_manager.register_filter(PropertyFilter())
pipeline_manager.register_filter(FingerprintFilter())


def default_pipeline() -> ScreenPipeline:
    return pipeline_manager.create_pipeline(DEFAULT_FILTERS)
