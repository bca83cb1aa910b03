"""暴力參考搜尋：每個連通子集對整個庫存做窮舉匹配"""

import time
from typing import Dict, List, Optional

from loguru import logger

from ..config.settings import EngineConfig
from ..core.registry import registry
from ..core.results import (
    CombinationStatus,
    FragmentCombination,
    RetroResult,
    Solution,
    StageStats,
    TerminationReason,
)
from ..engines.base import RetroEngine
from ..fragmenters.decomposition import FragmentDecomposition, combination_pattern
from ..molgraph.model import Molecule
from ..utils import bitset
from ..utils.exceptions import TooManyFragmentsError
from .naive import all_connected_subsets, naive_match, set_partitions

MAX_FRAGMENTS = 8


class BruteForceEngine(RetroEngine):
    """不篩選、不剪枝、不用先驗的參考引擎，片段數上限 8"""

    def _initialize(self):
        self.fragmenter = registry.create_fragmenter(self.config.mode, self.config.fragmenter_config())

    @property
    def name(self) -> str:
        return "brute_force"

    def search(self, decomposition: FragmentDecomposition, stock) -> RetroResult:
        """
        Raises:
            TooManyFragmentsError: 片段數超過 8
        """
        d = decomposition
        if d.k > MAX_FRAGMENTS:
            raise TooManyFragmentsError(f"暴力搜尋最多 {MAX_FRAGMENTS} 個片段，目標有 {d.k} 個")
        if len(stock) > 500:
            logger.warning(f"暴力搜尋的庫存有 {len(stock)} 筆，執行時間可能很長")

        result = RetroResult(decomposition=d)
        subsets = all_connected_subsets(d.k, d.adjacency)
        singles = [m for m in subsets if bitset.popcount(m) == 1]
        self._evaluate(d, stock, singles, result)
        if any(not result.evaluated[m].is_valid for m in singles):
            result.termination_reason = TerminationReason.INIT_FAIL
            return result

        self._evaluate(d, stock, [m for m in subsets if bitset.popcount(m) > 1], result)
        valid = set(result.valid_combinations)
        solutions = [
            Solution.of(blocks)
            for blocks in set_partitions(d.k)
            if all(block in valid for block in blocks)
        ]
        solutions.sort(key=lambda s: s.sort_key)
        cap = self.config.max_solutions
        result.truncated = len(solutions) > cap
        result.solutions = solutions[:cap]
        result.solved = bool(result.solutions)
        result.termination_reason = (
            TerminationReason.SOLUTION_CAP if result.truncated else TerminationReason.REACHED_TARGET
        )
        return result

    @staticmethod
    def _evaluate(d: FragmentDecomposition, stock, masks: List[int], result: RetroResult):
        per_stage: Dict[int, StageStats] = {}
        for members in masks:
            started = time.perf_counter()
            stage = bitset.popcount(members)
            stats = per_stage.setdefault(stage, StageStats(stage=stage))
            pattern = combination_pattern(d, members)
            matched = frozenset(
                entry.id for entry in stock if naive_match(pattern, entry.molecule)
            )
            stats.effective_count += 1
            stats.candidates += len(stock)
            stats.match_calls += len(stock)
            status = CombinationStatus.VALID if matched else CombinationStatus.INVALID
            combination = FragmentCombination(members, pattern, matched, status)
            result.evaluated[members] = combination
            if matched:
                result.valid_combinations[members] = combination
                stats.valid_count += 1
            stats.elapsed += time.perf_counter() - started
        result.stats.extend(per_stage[s] for s in sorted(per_stage))


def brute_force_retro(
    target: Molecule,
    stock,
    mode: str = "brics_like",
    config: Optional[EngineConfig] = None,
) -> RetroResult:
    """暴力參考搜尋

    Args:
        target: 目標分子
        stock: 建構塊庫存
        mode: 片段化模式
        config: 其他設定（只用到 rules_path、max_solutions）

    Raises:
        TooManyFragmentsError: 片段數超過 8
    """
    config = (config or EngineConfig()).model_copy(update={"mode": mode})
    return BruteForceEngine(config).run(target, stock)
