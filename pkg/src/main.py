"""fragretro 命令列介面

子命令：stock build、fragment、retro、bench、batch。
JSON 與 CSV 寫到 stdout，日誌寫到 stderr。

結束碼：0 成功（retro 為已解）、2 retro 未解、1 錯誤。
"""

import argparse
import csv
import json
import statistics
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from dotenv import load_dotenv
from loguru import logger
from rich.console import Console

from .bench.acceptance import ACCEPTANCE_COLUMNS, run_acceptance
from .bench.runner import (
    PARALLEL_COLUMNS,
    SCALING_COLUMNS,
    SCREENING_COLUMNS,
    default_targets,
    run_parallel,
    run_scaling,
    run_screening,
)
from .config.manager import ConfigManager
from .config.settings import EngineConfig, load_settings
from .core.registry import registry
from .fragmenters.rule_based import fragment
from .matching.screen import DEFAULT_NBITS, DEFAULT_PATH_MAX
from .molgraph.model import Molecule
from .molgraph.smiles import parse_smiles
from .stock.cache import load_cache, save_cache
from .stock.stock import DEFAULT_MAX_FAILURE_RATIO, Stock, build_stock, file_digest, read_records
from .utils.exceptions import FragmentRetroError, StockIOError
from .utils.logger import setup_logger

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSOLVED = 2

DEFAULT_SAMPLE_SIZE = 20


class _Parser(argparse.ArgumentParser):
    """用法錯誤回傳 1，讓 2 只代表「未解」"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _emit_json(payload: Any):
    sys.stdout.write(json.dumps(payload, ensure_ascii=False, sort_keys=False) + "\n")


def _emit_csv(columns: Sequence[str], rows: List[Dict[str, Any]]):
    writer = csv.DictWriter(sys.stdout, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def _workers_list(text: str) -> List[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"無效的工作者列表: {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"工作者數必須為正整數: {text!r}")
    return values


def _engine_config(args, manager: Optional[ConfigManager]) -> EngineConfig:
    """設定檔的值加上命令列覆寫"""
    config = EngineConfig.from_manager(manager)
    update: Dict[str, Any] = {}
    for option, field in (
        ("mode", "mode"),
        ("rules", "rules_path"),
        ("workers", "workers"),
        ("max_solutions", "max_solutions"),
        ("nbits", "nbits"),
        ("path_max", "path_max"),
    ):
        value = getattr(args, option, None)
        if value is not None:
            update[field] = value
    if getattr(args, "no_screening", False):
        update["screening"] = False
    if getattr(args, "first_hit", False):
        update["match_all"] = False
    try:
        return EngineConfig(**{**config.model_dump(), **update})
    except ValueError as e:
        raise FragmentRetroError(f"無效的參數: {str(e)}")


def _read_targets(path: str) -> List[Tuple[int, str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise StockIOError(f"無法讀取目標檔 {path}: {str(e)}")
    return read_records(text)


def _parse_targets(path: Optional[str]) -> List[Molecule]:
    if path is None:
        return default_targets()
    return [parse_smiles(smiles) for _, smiles in _read_targets(path)]


def _first_set(*values):
    """第一個不是 None 的值"""
    return next(value for value in values if value is not None)


def _load_stock(args, config: EngineConfig) -> Stock:
    """讀取快取；指紋參數須與設定一致，給了 --verify-source 時另外核對來源摘要"""
    source = getattr(args, "verify_source", None)
    digest = file_digest(source) if source else None
    return load_cache(args.stock, config.nbits, config.path_max, source_digest=digest)


def cmd_stock_build(args, manager: Optional[ConfigManager]) -> int:
    screen = manager.screen if manager else None
    section = manager.stock if manager else None
    nbits = _first_set(args.nbits, screen and screen.nbits, DEFAULT_NBITS)
    path_max = _first_set(args.path_max, screen and screen.path_max, DEFAULT_PATH_MAX)
    workers = _first_set(args.workers, section and section.build_workers, 1)
    ratio = _first_set(section and section.max_failure_ratio, DEFAULT_MAX_FAILURE_RATIO)

    started = time.perf_counter()
    stock = build_stock(args.input, nbits, path_max, workers, ratio)
    save_cache(stock, args.output)
    elapsed = time.perf_counter() - started

    console = Console(highlight=False)
    console.print(f"[bold]{len(stock)} entries[/bold] -> {args.output}")
    console.print(f"parse failures: {stock.report.failures}, duplicates: {stock.report.duplicates}")
    console.print(f"elapsed: {elapsed:.3f}s")
    return EXIT_OK


def cmd_fragment(args, manager: Optional[ConfigManager]) -> int:
    config = _engine_config(args, manager)
    molecule = parse_smiles(args.smiles)
    d = fragment(molecule, config.mode, config.rules_path)
    _emit_json(d.to_dict())
    return EXIT_OK


def cmd_retro(args, manager: Optional[ConfigManager]) -> int:
    config = _engine_config(args, manager)
    target = parse_smiles(args.smiles)
    stock = _load_stock(args, config)
    engine = registry.create_engine(args.engine, config)
    result = engine.run(target, stock)
    sample_size = _first_set(manager and manager.output.sample_size, DEFAULT_SAMPLE_SIZE)
    _emit_json(
        result.to_dict(
            stock,
            sample_size=sample_size,
            full_matches=args.full_matches,
            include_timings=not args.no_timings,
        )
    )
    return EXIT_OK if result.solved else EXIT_UNSOLVED


def cmd_bench(args, manager: Optional[ConfigManager]) -> int:
    config = _engine_config(args, manager)
    if args.kind == "acceptance":
        return _bench_acceptance(args, config)
    if args.stock is None:
        raise FragmentRetroError(f"bench {args.kind} 需要 --stock")
    stock = _load_stock(args, config)
    if args.kind == "scaling":
        targets = _parse_targets(args.targets) if args.targets else None
        _emit_csv(SCALING_COLUMNS, run_scaling(stock, targets, config))
    elif args.kind == "parallel":
        _emit_csv(PARALLEL_COLUMNS, run_parallel(stock, _parse_targets(args.targets), args.workers_list, config))
    else:
        _emit_csv(SCREENING_COLUMNS, run_screening(stock, _parse_targets(args.targets), config))
    return EXIT_OK


def _bench_acceptance(args, config: EngineConfig) -> int:
    """建立桌面基準並量測各門檻；任一未通過時結束碼為 1"""
    report = run_acceptance(
        seed=args.seed,
        stock_size=args.bb_count,
        target_count=args.target_count,
        workers_list=args.workers_list,
        config=config,
        build_workers=args.build_workers,
    )
    _emit_csv(ACCEPTANCE_COLUMNS, report.rows())
    return EXIT_OK if report.passed else EXIT_ERROR


def cmd_batch(args, manager: Optional[ConfigManager]) -> int:
    """每個目標一行 JSON，最後一行為彙總"""
    config = _engine_config(args, manager)
    stock = _load_stock(args, config)
    engine = registry.create_engine("fragment_retro", config)

    solved = 0
    counts: List[int] = []
    times: List[float] = []
    records = _read_targets(args.targets)
    with engine.session(stock):
        for lineno, smiles in records:
            line: Dict[str, Any] = {"smiles": smiles}
            started = time.perf_counter()
            try:
                result = engine.run(parse_smiles(smiles), stock)
            except FragmentRetroError as e:
                line["error"] = f"line {lineno}: {str(e)}"
                logger.warning(line["error"])
                _emit_json(line)
                continue
            elapsed = time.perf_counter() - started
            best = result.best_solution()
            line.update(
                {
                    "solved": result.solved,
                    "termination_reason": result.termination_reason.value,
                    "n_fragments": result.decomposition.k,
                    "n_solutions": len(result.solutions),
                    "best_size": best.size if best else None,
                    "elapsed": round(elapsed, 6),
                }
            )
            _emit_json(line)
            solved += int(result.solved)
            counts.append(len(result.solutions))
            times.append(elapsed)

    _emit_json(
        {
            "targets": len(records),
            "solved": solved,
            "solved_rate": round(solved / len(records), 6) if records else 0.0,
            "median_solutions": statistics.median(counts) if counts else 0,
            "mean_elapsed": round(statistics.fmean(times), 6) if times else 0.0,
        }
    )
    return EXIT_OK


def _add_engine_options(parser: argparse.ArgumentParser):
    parser.add_argument("--mode", choices=("brics_like", "rbrics_like"), default=None)
    parser.add_argument("--rules", default=None, help="自訂規則檔")
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--max-solutions", dest="max_solutions", type=int, default=None)
    parser.add_argument("--no-screening", dest="no_screening", action="store_true")
    parser.add_argument("--first-hit", dest="first_hit", action="store_true")


def _add_stock_options(parser: argparse.ArgumentParser, required: bool = True):
    parser.add_argument("--stock", required=required, default=None)
    parser.add_argument("--nbits", type=int, default=None, help="要求快取的指紋寬度")
    parser.add_argument("--path-max", dest="path_max", type=int, default=None)
    parser.add_argument(
        "--verify-source", dest="verify_source", default=None, help="核對快取是否由此 SMILES 檔建立"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fragretro", description="以片段為基礎、依庫存搜尋的逆合成工具")
    parser.add_argument("--config", default=None, help="config.ini 路徑")
    parser.add_argument("--log-level", dest="log_level", default=None)
    # 子命令也接受這兩個選項；SUPPRESS 讓未指定時不覆蓋上層的值
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS)
    common.add_argument("--log-level", dest="log_level", default=argparse.SUPPRESS)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    stock = commands.add_parser("stock", help="庫存管理")
    stock_commands = stock.add_subparsers(dest="stock_command", required=True, parser_class=_Parser)
    build = stock_commands.add_parser("build", parents=[common], help="由 SMILES 檔建立快取")
    build.add_argument("--in", dest="input", required=True)
    build.add_argument("--out", dest="output", required=True)
    build.add_argument("--nbits", type=int, default=None)
    build.add_argument("--path-max", dest="path_max", type=int, default=None)
    build.add_argument("--workers", type=int, default=None)
    build.set_defaults(handler=cmd_stock_build)

    frag = commands.add_parser("fragment", parents=[common], help="片段化單一分子")
    frag.add_argument("--smiles", required=True)
    frag.add_argument("--mode", choices=("brics_like", "rbrics_like"), default=None)
    frag.add_argument("--rules", default=None)
    frag.set_defaults(handler=cmd_fragment)

    retro = commands.add_parser("retro", parents=[common], help="對單一目標搜尋")
    retro.add_argument("--smiles", required=True)
    _add_stock_options(retro)
    _add_engine_options(retro)
    retro.add_argument("--engine", choices=("fragment_retro", "brute_force"), default="fragment_retro")
    retro.add_argument("--full-matches", dest="full_matches", action="store_true")
    retro.add_argument("--no-timings", dest="no_timings", action="store_true")
    retro.set_defaults(handler=cmd_retro)

    bench = commands.add_parser("bench", parents=[common], help="效能量測（CSV）")
    bench.add_argument("kind", choices=("scaling", "parallel", "screening", "acceptance"))
    _add_stock_options(bench, required=False)
    bench.add_argument("--targets", default=None)
    bench.add_argument("--workers-list", dest="workers_list", type=_workers_list, default=[1, 2, 4, 8])
    # 以下只用於 acceptance
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--bb-count", dest="bb_count", type=int, default=100_000)
    bench.add_argument("--target-count", dest="target_count", type=int, default=20)
    bench.add_argument("--build-workers", dest="build_workers", type=int, default=1)
    _add_engine_options(bench)
    bench.set_defaults(handler=cmd_bench)

    batch = commands.add_parser("batch", parents=[common], help="對目標檔逐一搜尋（JSON lines）")
    batch.add_argument("--targets", required=True)
    _add_stock_options(batch)
    _add_engine_options(batch)
    batch.set_defaults(handler=cmd_batch)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    try:
        manager = load_settings(args.config)
    except FragmentRetroError as e:
        setup_logger("WARNING")
        logger.error(str(e))
        return EXIT_ERROR
    level = args.log_level or (manager and manager.default.log_level) or "WARNING"
    setup_logger(level)

    try:
        return args.handler(args, manager)
    except FragmentRetroError as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
