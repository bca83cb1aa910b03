"""分階段、以庫存為依據的片段組合搜尋"""

import time
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np
from loguru import logger

from ..config.settings import EngineConfig
from ..core.pipeline import ScreenPipeline, default_pipeline
from ..core.registry import registry
from ..core.results import (
    CombinationStatus,
    FragmentCombination,
    RetroResult,
    StageStats,
    TerminationReason,
)
from ..core.solutions import enumerate_solutions
from ..core.workers import MatchTask, WorkerPool, match_task
from ..fragmenters.decomposition import FragmentDecomposition, combination_pattern
from ..matching.screen import QueryProfile
from ..molgraph.model import Molecule
from ..utils import bitset
from .base import RetroEngine

# 成員位元集合 → 先驗候選（None 表示整個庫存）
Candidates = Dict[int, Optional[FrozenSet[int]]]


class FragmentRetroEngine(RetroEngine):
    """分階段片段組合搜尋

    1. 評估所有初始片段；任一無命中即以 init_fail 結束。
    2. 第 n 階段由第 n-1 階段的有效組合各加一個相鄰片段產生候選，
       略過含已知無效子組合者，其餘先篩選再匹配。
    3. 沒有候選、完成整個目標（第 |F₁| 階段）或達到 max_stage 時停止，
       再以精確覆蓋列出所有解。
    """

    def _initialize(self):
        self.fragmenter = registry.create_fragmenter(self.config.mode, self.config.fragmenter_config())
        self.pipeline: ScreenPipeline = (
            default_pipeline() if self.config.screening else ScreenPipeline([])
        )

    @property
    def name(self) -> str:
        return "fragment_retro"

    def search(self, decomposition: FragmentDecomposition, stock) -> RetroResult:
        started = time.perf_counter()
        with self.worker_pool(stock) as pool:
            result = _Search(self, decomposition, stock, pool).execute()
        logger.info(
            f"{self.name}: {decomposition.k} 個片段，評估 {result.combinations_evaluated} 個組合，"
            f"{len(result.solutions)} 個解，{result.termination_reason.value}，"
            f"{time.perf_counter() - started:.3f}s"
        )
        return result


class _Search:
    """單次搜尋的狀態"""

    def __init__(self, engine: FragmentRetroEngine, d: FragmentDecomposition, stock, pool: WorkerPool):
        self.config: EngineConfig = engine.config
        self.pipeline = engine.pipeline
        self.d = d
        self.stock = stock
        self.pool = pool
        self.result = RetroResult(decomposition=d)
        self.invalid: List[int] = []

    def execute(self) -> RetroResult:
        d, result = self.d, self.result
        k = d.k

        singles: Candidates = {1 << i: None for i in range(k)}
        self._evaluate(1, singles, pruned=0)
        if any(not result.evaluated[m].is_valid for m in singles):
            result.termination_reason = TerminationReason.INIT_FAIL
            logger.info(f"初始片段無命中: {[d.label(m) for m in singles if not result.evaluated[m].is_valid]}")
            return result

        if k == 1:
            result.termination_reason = TerminationReason.REACHED_TARGET
        for n in range(2, k + 1):
            if self.config.max_stage and n > self.config.max_stage:
                result.termination_reason = TerminationReason.STAGE_LIMIT
                break
            candidates = self._generate(n)
            effective, pruned = self._prune(candidates)
            if not effective:
                result.termination_reason = TerminationReason.NO_EFFECTIVE
                result.stats.append(StageStats(stage=n, pruned=pruned))
                break
            self._evaluate(n, effective, pruned)
            if n == k:
                result.termination_reason = TerminationReason.REACHED_TARGET

        solutions, truncated = enumerate_solutions(
            result.valid_combinations.keys(), k, self.config.max_solutions
        )
        result.solutions = solutions
        result.solved = bool(solutions)
        result.truncated = truncated
        if truncated:
            result.termination_reason = TerminationReason.SOLUTION_CAP
        return result

    def _generate(self, n: int) -> Candidates:
        """擴展第 n-1 階段的有效組合；多個父組合的先驗取各交集的聯集"""
        matched = {m: c.matched_bbs for m, c in self.result.valid_combinations.items()}
        use_priors = self.config.priors_enabled
        candidates: Candidates = {}
        for parent in self.result.valid_at(n - 1):
            for j in bitset.iter_bits(self.d.boundary(parent)):
                child = parent | (1 << j)
                if not use_priors:
                    candidates[child] = None
                    continue
                prior = matched[parent] & matched[1 << j]
                previous = candidates.get(child)
                candidates[child] = prior if previous is None else previous | prior
        return candidates

    def _prune(self, candidates: Candidates) -> Tuple[Candidates, int]:
        if not self.config.pruning:
            return dict(sorted(candidates.items())), 0
        effective: Candidates = {}
        pruned = 0
        for child in sorted(candidates):
            if any(inv & child == inv for inv in self.invalid):
                pruned += 1
                continue
            effective[child] = candidates[child]
        return effective, pruned

    def _pattern(self, members: int) -> Molecule:
        return combination_pattern(self.d, members)

    def _evaluate(self, n: int, items: Candidates, pruned: int):
        started = time.perf_counter()
        stats = StageStats(stage=n, effective_count=len(items), pruned=pruned)
        stock = self.stock
        batch = self.config.batch_size if self.config.match_all else None

        owners: List[int] = []
        tasks: List[MatchTask] = []
        patterns: Dict[int, Molecule] = {}
        for members, prior in items.items():
            pattern = self._pattern(members)
            patterns[members] = pattern
            if prior is None:
                ids = np.arange(len(stock), dtype=np.int64)
            else:
                ids = np.fromiter(sorted(prior), dtype=np.int64, count=len(prior))
            stats.candidates += len(ids)
            if len(self.pipeline) and len(ids):
                profile = QueryProfile.of(pattern, stock.nbits, stock.path_max)
                kept = self.pipeline.apply(profile, stock, ids)
            else:
                kept = ids
            stats.screen_rejects += len(ids) - len(kept)
            kept_ids = tuple(int(i) for i in kept)
            step = batch or max(len(kept_ids), 1)
            for start in range(0, len(kept_ids), step):
                owners.append(members)
                tasks.append((pattern, kept_ids[start : start + step], self.config.match_all))

        hits: Dict[int, List[int]] = {members: [] for members in items}
        for members, (found, calls) in zip(owners, self.pool.map(match_task, tasks)):
            hits[members].extend(found)
            stats.match_calls += calls

        for members in items:
            matched = frozenset(hits[members])
            status = CombinationStatus.VALID if matched else CombinationStatus.INVALID
            combination = FragmentCombination(members, patterns[members], matched, status)
            self.result.evaluated[members] = combination
            if matched:
                self.result.valid_combinations[members] = combination
                stats.valid_count += 1
            else:
                self.invalid.append(members)
            logger.debug(f"stage {n} {self.d.label(members)}: {len(matched)} 個命中")

        stats.elapsed = time.perf_counter() - started
        self.result.stats.append(stats)
        logger.info(
            f"stage {n}: {stats.effective_count} 個組合，{stats.valid_count} 個有效，"
            f"{stats.match_calls} 次匹配，篩除 {stats.screen_rejects}"
        )


def run(target: Molecule, stock, config: Optional[EngineConfig] = None) -> RetroResult:
    """片段化目標並執行分階段搜尋

    Args:
        target: 單一組分的目標分子
        stock: 建構塊庫存
        config: 引擎設定，None 使用預設值

    Returns:
        RetroResult
    """
    return FragmentRetroEngine(config or EngineConfig()).run(target, stock)


def run_without_screening(target: Molecule, stock, config: Optional[EngineConfig] = None) -> RetroResult:
    """與 run 相同，但不做性質與指紋篩選（候選即先驗集合）"""
    config = (config or EngineConfig()).model_copy(update={"screening": False})
    return FragmentRetroEngine(config).run(target, stock)
