from abc import ABC, abstractmethod
from contextlib import contextmanager
from typing import TYPE_CHECKING, Iterator, Optional

from ..config.settings import EngineConfig
from ..core.workers import WorkerPool
from ..molgraph.model import Molecule

if TYPE_CHECKING:
    from ..core.results import RetroResult
    from ..fragmenters.decomposition import FragmentDecomposition
    from ..stock.stock import Stock


class RetroEngine(ABC):
    """逆合成搜尋引擎抽象基類"""

    def __init__(self, config: EngineConfig):
        """初始化引擎

        Args:
            config: 引擎設定
        """
        self.config = config
        self._pool: Optional[WorkerPool] = None
        self._pool_stock: Optional["Stock"] = None
        self._initialize()

    @abstractmethod
    def _initialize(self):
        """初始化引擎（建立片段化器等）"""
        pass

    @property
    @abstractmethod
    def name(self) -> str:
        """返回引擎名稱"""
        pass

    def decompose(self, target: Molecule) -> "FragmentDecomposition":
        """以設定的模式片段化目標"""
        return self.fragmenter.fragment(target)

    @abstractmethod
    def search(self, decomposition: "FragmentDecomposition", stock: "Stock") -> "RetroResult":
        """在已分解的目標上搜尋

        Args:
            decomposition: 片段分解
            stock: 建構塊庫存

        Returns:
            搜尋結果
        """
        pass

    def run(self, target: Molecule, stock: "Stock") -> "RetroResult":
        """片段化目標後搜尋

        Args:
            target: 單一組分的目標分子
            stock: 建構塊庫存

        Returns:
            搜尋結果

        Raises:
            CacheVersionMismatchError: 庫存的指紋參數與設定不同
        """
        stock.require_fp_params(self.config.nbits, self.config.path_max)
        return self.search(self.decompose(target), stock)

    @contextmanager
    def session(self, stock: "Stock") -> Iterator["RetroEngine"]:
        """在 with 區塊內對同一庫存的搜尋共用一個工作池

        工作行程只在進入時接收一次庫存，已解析的建構塊分子保留到離開為止。

        Example:
            with engine.session(stock):
                results = [engine.run(t, stock) for t in targets]
        """
        stock.require_fp_params(self.config.nbits, self.config.path_max)
        with WorkerPool(self.config.workers, stock) as pool:
            self._pool, self._pool_stock = pool, stock
            try:
                yield self
            finally:
                self._pool, self._pool_stock = None, None

    @contextmanager
    def worker_pool(self, stock: "Stock") -> Iterator[WorkerPool]:
        """session 內的同一庫存沿用既有工作池，否則開一個只供本次搜尋使用的"""
        if self._pool is not None and self._pool_stock is stock:
            yield self._pool
            return
        with WorkerPool(self.config.workers, stock) as pool:
            yield pool
