"""桌面規模的驗收量測

以合成的大型庫存重現三項效能門檻：篩選效益、平行加速與寡聚物系列的
組合數上界。每項結果是一個 Criterion，全部通過時 AcceptanceReport.passed 為真。
"""

import random
import statistics
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..config.settings import EngineConfig
from ..molgraph.model import Molecule
from ..molgraph.smiles import write_smiles
from ..stock.stock import Stock, build_stock
from .generators import catalogue_molecule, oligomer, random_stock, random_targets
from .runner import Row, run_parallel, run_scaling, run_screening

SCREEN_TIME_RATIO = 0.67
SCREEN_CALL_REDUCTION = 5.0
PARALLEL_SPEEDUP = 2.0
PARALLEL_WORKERS = 4
SCALING_SLOPE = 2.4
SCALING_SIZES = (4, 8, 12, 16, 20, 24, 28, 32)

ACCEPTANCE_COLUMNS = ("criterion", "measured", "threshold", "passed")


@dataclass(frozen=True)
class Criterion:
    """單一門檻；at_most 為真時 measured ≤ threshold 才算通過，否則須 ≥"""

    name: str
    measured: float
    threshold: float
    at_most: bool = False

    @property
    def passed(self) -> bool:
        if self.at_most:
            return self.measured <= self.threshold
        return self.measured >= self.threshold

    def to_row(self) -> Row:
        return {
            "criterion": self.name,
            "measured": round(self.measured, 4),
            "threshold": self.threshold,
            "passed": self.passed,
        }


@dataclass
class AcceptanceReport:
    criteria: List[Criterion]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    @property
    def failures(self) -> List[Criterion]:
        return [c for c in self.criteria if not c.passed]

    def rows(self) -> List[Row]:
        return [c.to_row() for c in self.criteria]


def desk_benchmark(
    seed: int = 0,
    stock_size: int = 100_000,
    target_count: int = 20,
    min_heavy: int = 30,
    max_heavy: int = 60,
    config: Optional[EngineConfig] = None,
    build_workers: int = 1,
) -> Tuple[Stock, List[Molecule]]:
    """產生桌面基準：目標與含其片段組合、其餘為目錄型背景分子的庫存

    Args:
        seed: 亂數種子
        stock_size: 庫存大小上限
        target_count: 目標數
        min_heavy: 目標最少重原子數
        max_heavy: 目標最多重原子數
        config: 取用 mode 與指紋參數
        build_workers: 解析庫存的行程數

    Returns:
        (庫存, 目標)
    """
    config = config or EngineConfig()
    rng = random.Random(seed)
    targets = random_targets(
        rng,
        target_count,
        min_fragments=2,
        max_fragments=12,
        max_units=14,
        min_heavy=min_heavy,
        max_heavy=max_heavy,
        attempts=2000,
    )
    smiles = random_stock(rng, targets, stock_size, background=catalogue_molecule)
    logger.info(f"桌面基準: {len(targets)} 個目標，庫存 {len(smiles)} 筆")
    if build_workers <= 1:
        return Stock.from_smiles(smiles, config.nbits, config.path_max), targets
    with tempfile.TemporaryDirectory() as workdir:
        source = Path(workdir) / "desk.smi"
        source.write_text("\n".join(smiles) + "\n", encoding="utf-8")
        stock = build_stock(source, config.nbits, config.path_max, build_workers)
    return stock, targets


def screening_criteria(stock: Stock, targets: Sequence[Molecule], config: EngineConfig) -> List[Criterion]:
    """篩選開啟時的時間比中位數與匹配呼叫減少倍數"""
    rows = run_screening(stock, targets, config)
    ratios = [r["elapsed_on"] / r["elapsed_off"] for r in rows if r["elapsed_off"]]
    calls_on = sum(r["match_calls_on"] for r in rows)
    calls_off = sum(r["match_calls_off"] for r in rows)
    median_ratio = statistics.median(ratios) if ratios else 1.0
    return [
        Criterion("screening_time_ratio", median_ratio, SCREEN_TIME_RATIO, at_most=True),
        Criterion("screening_call_reduction", calls_off / max(calls_on, 1), SCREEN_CALL_REDUCTION),
    ]


def parallel_criteria(
    stock: Stock,
    targets: Sequence[Molecule],
    config: EngineConfig,
    workers_list: Sequence[int] = (1, 2, 4, 8),
    speedup_at: int = PARALLEL_WORKERS,
) -> List[Criterion]:
    """speedup_at 個工作者相對第一個工作者數的加速

    各工作者數的輸出不一致時 run_parallel 直接拋出 BenchmarkError。
    """
    rows = run_parallel(stock, targets, workers_list, config)
    return [
        Criterion(f"parallel_speedup_{row['workers']}", row["speedup"], PARALLEL_SPEEDUP)
        for row in rows
        if row["workers"] == speedup_at
    ]


def scaling_criteria(config: EngineConfig, sizes: Sequence[int] = SCALING_SIZES) -> List[Criterion]:
    """寡聚物系列：組合數須恰為 N(N+1)/2，耗時對重原子數的對數斜率有上限

    庫存只含最長的寡聚物，其餘長度的所有真子組合都能嚴格匹配。
    """
    longest = oligomer(max(sizes))
    stock = Stock.from_smiles([write_smiles(longest)], config.nbits, config.path_max)
    rows = run_scaling(stock, config=config, sizes=sizes)
    wrong = sum(
        1
        for n, row in zip(sizes, rows)
        if row["fragments"] != n or row["combinations_evaluated"] != n * (n + 1) // 2
    )
    heavy = np.log([row["heavy_atoms"] for row in rows])
    elapsed = np.log([max(row["elapsed"], 1e-6) for row in rows])
    slope = float(np.polyfit(heavy, elapsed, 1)[0]) if len(rows) >= 2 else 0.0
    return [
        Criterion("scaling_count_mismatches", wrong, 0, at_most=True),
        Criterion("scaling_loglog_slope", slope, SCALING_SLOPE, at_most=True),
    ]


def run_acceptance(
    seed: int = 0,
    stock_size: int = 100_000,
    target_count: int = 20,
    workers_list: Sequence[int] = (1, 2, 4, 8),
    config: Optional[EngineConfig] = None,
    build_workers: int = 1,
) -> AcceptanceReport:
    """建立桌面基準並量測全部門檻"""
    config = config or EngineConfig()
    stock, targets = desk_benchmark(seed, stock_size, target_count, config=config, build_workers=build_workers)
    criteria: List[Criterion] = []
    criteria += screening_criteria(stock, targets, config)
    criteria += parallel_criteria(stock, targets, config, workers_list)
    criteria += scaling_criteria(config)
    report = AcceptanceReport(criteria)
    for criterion in report.failures:
        logger.error(f"未通過 {criterion.name}: {criterion.measured:.4f}（門檻 {criterion.threshold}）")
    return report
