"""建構塊庫存：讀取、預先計算量測與指紋"""

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from ..core.workers import WorkerPool
from ..matching.screen import DEFAULT_NBITS, DEFAULT_PATH_MAX, PatternFingerprint, check_params, fingerprint
from ..molgraph.model import Molecule
from ..molgraph.smiles import parse_smiles
from ..utils.exceptions import (
    CacheVersionMismatchError,
    FragmentRetroError,
    StockIOError,
    TooManyParseFailuresError,
)

DEFAULT_MAX_FAILURE_RATIO = 0.10
_WARN_LIMIT = 5


@dataclass(eq=False)
class StockEntry:
    """單一建構塊；molecule 在第一次使用時才由 SMILES 解析"""

    id: int
    smiles: str
    heavy_atoms: int
    rings: int
    fp: PatternFingerprint
    _molecule: Optional[Molecule] = field(default=None, repr=False)

    @property
    def molecule(self) -> Molecule:
        if self._molecule is None:
            self._molecule = parse_smiles(self.smiles)
        return self._molecule

    def __eq__(self, other) -> bool:
        if not isinstance(other, StockEntry):
            return NotImplemented
        return (
            self.id == other.id
            and self.smiles == other.smiles
            and self.heavy_atoms == other.heavy_atoms
            and self.rings == other.rings
            and self.fp == other.fp
        )

    def __getstate__(self):
        return (self.id, self.smiles, self.heavy_atoms, self.rings, self.fp)

    def __setstate__(self, state):
        self.id, self.smiles, self.heavy_atoms, self.rings, self.fp = state
        self._molecule = None


@dataclass(frozen=True)
class BuildReport:
    lines: int = 0
    duplicates: int = 0
    failures: int = 0
    failed_lines: Tuple[int, ...] = ()


class Stock:
    """不可變的建構塊庫存

    另外保存 heavy/rings 陣列與 (n, nbits/64) 的 uint64 指紋矩陣供向量化篩選。
    """

    def __init__(
        self,
        entries: Sequence[StockEntry],
        nbits: int = DEFAULT_NBITS,
        path_max: int = DEFAULT_PATH_MAX,
        source_digest: bytes = b"\x00" * 32,
        report: Optional[BuildReport] = None,
    ):
        check_params(nbits, path_max)
        self.entries: Tuple[StockEntry, ...] = tuple(entries)
        self.nbits = nbits
        self.path_max = path_max
        self.source_digest = source_digest
        self.report = report or BuildReport(lines=len(self.entries))

        words = nbits // 64
        if self.entries:
            self.fp_matrix = np.stack([e.fp.bits for e in self.entries]).astype(np.uint64)
        else:
            self.fp_matrix = np.zeros((0, words), dtype=np.uint64)
        self.heavy = np.array([e.heavy_atoms for e in self.entries], dtype=np.int64)
        self.rings = np.array([e.rings for e in self.entries], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[StockEntry]:
        return iter(self.entries)

    def __getitem__(self, bb_id: int) -> StockEntry:
        return self.entries[bb_id]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Stock):
            return NotImplemented
        return (
            self.fp_params == other.fp_params
            and self.source_digest == other.source_digest
            and self.entries == other.entries
        )

    def __repr__(self) -> str:
        return f"Stock(entries={len(self)}, nbits={self.nbits}, path_max={self.path_max})"

    @property
    def fp_params(self) -> Tuple[int, int]:
        return self.nbits, self.path_max

    def molecule(self, bb_id: int) -> Molecule:
        return self.entries[bb_id].molecule

    def require_fp_params(self, nbits: int, path_max: int):
        """庫存的指紋參數必須與設定相同

        Raises:
            CacheVersionMismatchError: 庫存以不同的 nbits 或 path_max 建立
        """
        if self.fp_params != (nbits, path_max):
            raise CacheVersionMismatchError(
                f"庫存指紋參數 nbits={self.nbits}, path_max={self.path_max}，"
                f"設定為 nbits={nbits}, path_max={path_max}"
            )

    @classmethod
    def from_smiles(
        cls,
        smiles: Sequence[str],
        nbits: int = DEFAULT_NBITS,
        path_max: int = DEFAULT_PATH_MAX,
    ) -> "Stock":
        """由 SMILES 列表直接建立（測試與產生器用；解析失敗即拋出）"""
        text = "\n".join(smiles)
        unique = list(dict.fromkeys(smiles))
        entries = []
        for bb_id, s in enumerate(unique):
            molecule = parse_smiles(s)
            entries.append(_entry(bb_id, s, molecule, nbits, path_max))
        digest = hashlib.sha256(text.encode("utf-8")).digest()
        return cls(entries, nbits, path_max, digest)


def _entry(bb_id: int, smiles: str, molecule: Molecule, nbits: int, path_max: int) -> StockEntry:
    return StockEntry(
        id=bb_id,
        smiles=smiles,
        heavy_atoms=molecule.heavy_atom_count,
        rings=molecule.ring_count,
        fp=fingerprint(molecule, nbits, path_max),
        _molecule=molecule,
    )


def _prepare(args: Tuple[str, int, int]) -> Union[Tuple[int, int, bytes], str]:
    """解析並計算量測；失敗時回傳錯誤訊息"""
    smiles, nbits, path_max = args
    try:
        molecule = parse_smiles(smiles)
    except FragmentRetroError as e:
        return str(e)
    if molecule.has_attachments:
        return "建構塊不可含連接點"
    fp = fingerprint(molecule, nbits, path_max)
    return molecule.heavy_atom_count, molecule.ring_count, fp.to_bytes()


def file_digest(path: Union[str, Path]) -> bytes:
    """來源檔的 sha256，與 build_stock 寫進快取標頭的摘要相同

    Raises:
        StockIOError: 檔案無法讀取
    """
    try:
        return hashlib.sha256(Path(path).read_bytes()).digest()
    except OSError as e:
        raise StockIOError(f"無法讀取來源檔 {path}: {str(e)}")


def read_records(text: str) -> List[Tuple[int, str]]:
    """(行號, SMILES)；略過空行與 '#' 註解，取第一個 TAB 欄位"""
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        records.append((lineno, line.split("\t", 1)[0].strip()))
    return records


def build_stock(
    path: Union[str, Path],
    nbits: int = DEFAULT_NBITS,
    path_max: int = DEFAULT_PATH_MAX,
    workers: int = 1,
    max_failure_ratio: float = DEFAULT_MAX_FAILURE_RATIO,
) -> Stock:
    """讀取 SMILES 檔建立庫存

    條目依檔案順序，相同字串只保留第一個；無法解析的行只計數，
    失敗行數超過 max_failure_ratio 時中止。

    Args:
        path: SMILES 檔（每行一筆，可帶 TAB 分隔的標籤）
        nbits: 指紋寬度
        path_max: 指紋路徑最大鍵數
        workers: 解析與指紋計算的行程數
        max_failure_ratio: 允許的失敗比例

    Returns:
        Stock

    Raises:
        StockIOError: 檔案無法讀取或不是 UTF-8
        TooManyParseFailuresError: 失敗比例超過門檻
    """
    check_params(nbits, path_max)
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise StockIOError(f"無法讀取庫存檔 {path}: {str(e)}")
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise StockIOError(f"庫存檔不是 UTF-8 編碼 {path}: {str(e)}")

    records = read_records(text)
    unique: Dict[str, int] = {}
    for lineno, smiles in records:
        unique.setdefault(smiles, lineno)
    ordered = list(unique)

    with WorkerPool(workers) as pool:
        prepared = pool.map(_prepare, [(s, nbits, path_max) for s in ordered])

    failed: Dict[str, str] = {}
    entries: List[StockEntry] = []
    for smiles, outcome in zip(ordered, prepared):
        if isinstance(outcome, str):
            failed[smiles] = outcome
            continue
        heavy, rings, fp_bytes = outcome
        entries.append(
            StockEntry(
                id=len(entries),
                smiles=smiles,
                heavy_atoms=heavy,
                rings=rings,
                fp=PatternFingerprint.from_bytes(fp_bytes, nbits, path_max),
            )
        )

    failed_lines = tuple(lineno for lineno, smiles in records if smiles in failed)
    for lineno in failed_lines[:_WARN_LIMIT]:
        smiles = next(s for n, s in records if n == lineno)
        logger.warning(f"{path.name}:{lineno} 無法解析 {smiles!r}: {failed[smiles]}")

    report = BuildReport(
        lines=len(records),
        duplicates=len(records) - len(ordered),
        failures=len(failed_lines),
        failed_lines=failed_lines,
    )
    logger.info(
        f"庫存 {path.name}: {len(entries)} 筆，重複 {report.duplicates}，失敗 {report.failures}"
    )
    if records and report.failures / len(records) > max_failure_ratio:
        raise TooManyParseFailuresError(
            f"{report.failures}/{len(records)} 行無法解析，超過 {max_failure_ratio:.0%}"
        )

    digest = hashlib.sha256(raw).digest()
    return Stock(entries, nbits, path_max, digest, report)
