"""庫存快取檔（little-endian 二進位）

    header  magic "FRSK" | u32 version | u32 nbits | u32 path_max | 32B sha256 | u64 count
    entry   u32 smiles_len | smiles | u32 heavy | u32 rings | nbits/8 位元組指紋
    trailer 8 位元組 blake2b 校驗（涵蓋 trailer 之前的所有位元組）
"""

import hashlib
import struct
from pathlib import Path
from typing import Optional, Union

from loguru import logger

from ..matching.screen import PatternFingerprint
from ..utils.exceptions import CacheVersionMismatchError, CorruptCacheError, StockIOError
from .stock import Stock, StockEntry

MAGIC = b"FRSK"
CACHE_VERSION = 1
HEADER = struct.Struct("<4sIII32sQ")
ENTRY_LEN = struct.Struct("<I")
ENTRY_MEASURES = struct.Struct("<II")
CHECKSUM_SIZE = 8


def _checksum(payload: bytes) -> bytes:
    return hashlib.blake2b(payload, digest_size=CHECKSUM_SIZE).digest()


def encode_stock(stock: Stock) -> bytes:
    parts = [
        HEADER.pack(MAGIC, CACHE_VERSION, stock.nbits, stock.path_max, stock.source_digest, len(stock))
    ]
    for entry in stock:
        smiles = entry.smiles.encode("utf-8")
        parts.append(ENTRY_LEN.pack(len(smiles)))
        parts.append(smiles)
        parts.append(ENTRY_MEASURES.pack(entry.heavy_atoms, entry.rings))
        parts.append(entry.fp.to_bytes())
    payload = b"".join(parts)
    return payload + _checksum(payload)


def save_cache(stock: Stock, path: Union[str, Path]):
    """寫入快取檔

    Raises:
        StockIOError: 寫入失敗
    """
    path = Path(path)
    data = encode_stock(stock)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as e:
        raise StockIOError(f"無法寫入快取 {path}: {str(e)}")
    logger.info(f"快取已寫入 {path} ({len(stock)} 筆, {len(data)} bytes)")


def decode_stock(
    data: bytes,
    nbits: Optional[int] = None,
    path_max: Optional[int] = None,
    source_digest: Optional[bytes] = None,
) -> Stock:
    """解碼快取內容；依序檢查 magic、版本、校驗、指紋參數、來源摘要"""
    if len(data) < HEADER.size + CHECKSUM_SIZE:
        raise CorruptCacheError(f"快取長度不足: {len(data)} bytes")
    magic, version, cached_nbits, cached_path_max, digest, count = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise CorruptCacheError(f"不是庫存快取檔: magic={magic!r}")
    if version != CACHE_VERSION:
        raise CacheVersionMismatchError(f"快取版本 {version}，需要 {CACHE_VERSION}")

    payload, trailer = data[:-CHECKSUM_SIZE], data[-CHECKSUM_SIZE:]
    if _checksum(payload) != trailer:
        raise CorruptCacheError("快取校驗失敗（檔案可能被截斷或修改）")

    if nbits is not None and cached_nbits != nbits:
        raise CacheVersionMismatchError(f"快取 nbits={cached_nbits}，設定為 {nbits}")
    if path_max is not None and cached_path_max != path_max:
        raise CacheVersionMismatchError(f"快取 path_max={cached_path_max}，設定為 {path_max}")
    if source_digest is not None and digest != source_digest:
        raise CacheVersionMismatchError("快取與來源檔內容不符")
    if cached_nbits == 0 or cached_nbits % 64:
        raise CorruptCacheError(f"無效的 nbits: {cached_nbits}")

    fp_size = cached_nbits // 8
    offset = HEADER.size
    entries = []
    try:
        for bb_id in range(count):
            (length,) = ENTRY_LEN.unpack_from(payload, offset)
            offset += ENTRY_LEN.size
            smiles_bytes = payload[offset : offset + length]
            if len(smiles_bytes) != length:
                raise CorruptCacheError("條目超出檔案範圍")
            offset += length
            heavy, rings = ENTRY_MEASURES.unpack_from(payload, offset)
            offset += ENTRY_MEASURES.size
            fp_bytes = payload[offset : offset + fp_size]
            if len(fp_bytes) != fp_size:
                raise CorruptCacheError("指紋超出檔案範圍")
            offset += fp_size
            entries.append(
                StockEntry(
                    id=bb_id,
                    smiles=smiles_bytes.decode("utf-8"),
                    heavy_atoms=heavy,
                    rings=rings,
                    fp=PatternFingerprint.from_bytes(fp_bytes, cached_nbits, cached_path_max),
                )
            )
    except (struct.error, UnicodeDecodeError) as e:
        raise CorruptCacheError(f"快取內容損毀: {str(e)}")
    if offset != len(payload):
        raise CorruptCacheError(f"快取尾端有多餘的 {len(payload) - offset} bytes")

    return Stock(entries, cached_nbits, cached_path_max, digest)


def load_cache(
    path: Union[str, Path],
    nbits: Optional[int] = None,
    path_max: Optional[int] = None,
    source_digest: Optional[bytes] = None,
) -> Stock:
    """讀取快取檔

    Args:
        path: 快取檔路徑
        nbits: 預期的指紋寬度；None 表示接受快取中的值
        path_max: 預期的路徑長度；None 表示接受快取中的值
        source_digest: 預期的來源檔 sha256

    Returns:
        Stock

    Raises:
        StockIOError: 檔案無法讀取
        CacheVersionMismatchError: 版本、指紋參數或來源摘要不符
        CorruptCacheError: magic 錯誤、截斷或校驗失敗
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise StockIOError(f"無法讀取快取 {path}: {str(e)}")
    stock = decode_stock(data, nbits, path_max, source_digest)
    logger.debug(f"快取 {path.name}: {len(stock)} 筆")
    return stock
