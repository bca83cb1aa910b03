"""順序保持的批次工作池

workers > 1 時使用 ProcessPoolExecutor，庫存透過 initializer 每個行程送一次；
workers == 1 時在本行程內直接執行。結果一律依提交順序回傳，
所以任何 worker 數的輸出都相同。
"""

from concurrent.futures import ProcessPoolExecutor
from typing import TYPE_CHECKING, Callable, List, Optional, Sequence, Tuple, TypeVar

from loguru import logger

from ..matching.matcher import SubstructureMatcher
from ..molgraph.model import Molecule

if TYPE_CHECKING:
    from ..stock.stock import Stock

T = TypeVar("T")
R = TypeVar("R")

# (pattern, 候選 id, 是否找出全部)
MatchTask = Tuple[Molecule, Tuple[int, ...], bool]

_STOCK: Optional["Stock"] = None


def _init_worker(stock: Optional["Stock"]):
    global _STOCK
    _STOCK = stock


def match_task(task: MatchTask) -> Tuple[Tuple[int, ...], int]:
    """對一批候選建構塊做嚴格匹配

    Returns:
        (命中的 id, match_substructure 呼叫次數)
    """
    pattern, ids, match_all = task
    if _STOCK is None:
        raise RuntimeError("工作行程尚未載入庫存")
    matcher = SubstructureMatcher(pattern)
    hits: List[int] = []
    calls = 0
    for bb_id in ids:
        calls += 1
        if matcher.matches(_STOCK.molecule(bb_id)):
            hits.append(bb_id)
            if not match_all:
                break
    return tuple(hits), calls


class WorkerPool:
    """批次工作池（context manager）

    Args:
        workers: 行程數，1 表示不開子行程
        stock: 工作函式透過模組層級變數讀取的庫存
    """

    def __init__(self, workers: int = 1, stock: Optional["Stock"] = None):
        self.workers = max(1, int(workers))
        self.stock = stock
        self._executor: Optional[ProcessPoolExecutor] = None
        self._previous: Optional["Stock"] = None

    def __enter__(self) -> "WorkerPool":
        if self.workers > 1:
            self._executor = ProcessPoolExecutor(
                max_workers=self.workers,
                initializer=_init_worker,
                initargs=(self.stock,),
            )
            logger.debug(f"啟動 {self.workers} 個工作行程")
        else:
            self._previous = _STOCK
            _init_worker(self.stock)
        return self

    def __exit__(self, exc_type, exc, tb):
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None
        else:
            _init_worker(self._previous)
            self._previous = None

    @property
    def is_parallel(self) -> bool:
        return self._executor is not None

    def map(self, func: Callable[[T], R], items: Sequence[T]) -> List[R]:
        """依輸入順序回傳 func(item)"""
        if not items:
            return []
        if self._executor is None:
            return [func(item) for item in items]
        chunksize = max(1, len(items) // (self.workers * 4))
        return list(self._executor.map(func, items, chunksize=chunksize))
