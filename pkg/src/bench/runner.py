"""桌面規模的效能量測：規模成長、平行加速、篩選效益"""

import json
import random
import statistics
import time
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from ..config.settings import EngineConfig
from ..engines.fragment_retro import FragmentRetroEngine
from ..molgraph.model import Molecule
from ..molgraph.smiles import write_smiles
from ..utils.exceptions import BenchmarkError
from .generators import oligomer, random_targets

Row = Dict[str, object]

SCALING_COLUMNS = ("heavy_atoms", "fragments", "combinations_evaluated", "elapsed")
PARALLEL_COLUMNS = ("workers", "elapsed", "speedup")
SCREENING_COLUMNS = ("target", "elapsed_on", "elapsed_off", "match_calls_on", "match_calls_off")


def default_targets(count: int = 5, seed: int = 0) -> List[Molecule]:
    """未指定目標檔時使用的固定種子隨機目標"""
    return random_targets(random.Random(seed), count, min_fragments=3, max_fragments=8)


def _timed(engine: FragmentRetroEngine, target: Molecule, stock):
    started = time.perf_counter()
    result = engine.run(target, stock)
    return result, time.perf_counter() - started


def run_scaling(
    stock,
    targets: Optional[Sequence[Molecule]] = None,
    config: Optional[EngineConfig] = None,
    sizes: Sequence[int] = (4, 8, 12, 16, 20, 24, 28, 32),
) -> List[Row]:
    """每個目標一列 (heavy_atoms, fragments, combinations_evaluated, elapsed)

    未指定目標時使用對位聚苯系列，庫存應包含最長的寡聚物以全部命中。
    """
    engine = FragmentRetroEngine(config or EngineConfig())
    targets = list(targets) if targets is not None else [oligomer(n) for n in sizes]
    rows = []
    with engine.session(stock):
        for target in targets:
            result, elapsed = _timed(engine, target, stock)
            rows.append(
                {
                    "heavy_atoms": target.heavy_atom_count,
                    "fragments": result.decomposition.k,
                    "combinations_evaluated": result.combinations_evaluated,
                    "elapsed": round(elapsed, 6),
                }
            )
            logger.info(f"scaling: {rows[-1]}")
    return rows


def _batch_output(engine: FragmentRetroEngine, targets: Sequence[Molecule], stock) -> Tuple[str, float]:
    """同一個工作池跑完所有目標；計時包含工作行程載入庫存"""
    started = time.perf_counter()
    with engine.session(stock):
        payload = [engine.run(t, stock).to_dict(stock, include_timings=False) for t in targets]
    return json.dumps(payload, sort_keys=True), time.perf_counter() - started


def run_parallel(
    stock,
    targets: Sequence[Molecule],
    workers_list: Sequence[int] = (1, 2, 4, 8),
    config: Optional[EngineConfig] = None,
) -> List[Row]:
    """每個工作者數一列 (workers, elapsed, speedup)；speedup 以第一個工作者數為基準

    Raises:
        BenchmarkError: 不同工作者數的 JSON 輸出（不含計時）不一致
    """
    base = config or EngineConfig()
    rows: List[Row] = []
    reference_output = None
    reference_elapsed = None
    for workers in workers_list:
        engine = FragmentRetroEngine(base.model_copy(update={"workers": workers}))
        output, elapsed = _batch_output(engine, targets, stock)
        if reference_output is None:
            reference_output, reference_elapsed = output, elapsed
        elif output != reference_output:
            raise BenchmarkError(f"workers={workers} 的輸出與 workers={workers_list[0]} 不一致")
        speedup = reference_elapsed / elapsed if elapsed > 0 else 1.0
        rows.append({"workers": workers, "elapsed": round(elapsed, 6), "speedup": round(speedup, 3)})
        logger.info(f"parallel: {rows[-1]}")
    return rows


def run_screening(
    stock,
    targets: Sequence[Molecule],
    config: Optional[EngineConfig] = None,
) -> List[Row]:
    """每個目標一列 (target, elapsed_on, elapsed_off, match_calls_on, match_calls_off)

    Raises:
        BenchmarkError: 篩選開關改變了搜尋結果
    """
    base = config or EngineConfig()
    screened = FragmentRetroEngine(base.model_copy(update={"screening": True}))
    unscreened = FragmentRetroEngine(base.model_copy(update={"screening": False}))
    rows: List[Row] = []
    with screened.session(stock), unscreened.session(stock):
        for target in targets:
            on, elapsed_on = _timed(screened, target, stock)
            off, elapsed_off = _timed(unscreened, target, stock)
            if on.signature() != off.signature():
                raise BenchmarkError(f"篩選開關改變了結果: {write_smiles(target)}")
            rows.append(
                {
                    "target": write_smiles(target),
                    "elapsed_on": round(elapsed_on, 6),
                    "elapsed_off": round(elapsed_off, 6),
                    "match_calls_on": on.match_calls,
                    "match_calls_off": off.match_calls,
                }
            )
    ratios = [r["elapsed_on"] / r["elapsed_off"] for r in rows if r["elapsed_off"]]
    if ratios:
        logger.info(f"screening: 時間比中位數 {statistics.median(ratios):.3f}")
    return rows
