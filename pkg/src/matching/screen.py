"""路徑型指紋與候選篩選

指紋由 0..path_max 鍵的簡單路徑組成，路徑標籤只含 (元素, 芳香, 電荷)
與鍵級；分子自身環上的原子與鍵另外加入環特徵。連接點原子及經過它的
路徑不產生特徵。嵌入會把查詢的路徑與環映射到目標的路徑與環，
所以 match_substructure(q, t) 成立時 bits(q) ⊆ bits(t)。
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, FrozenSet, Iterable, List, Optional, Set

import numpy as np

from ..molgraph.model import Molecule
from ..utils.exceptions import ConfigurationError

if TYPE_CHECKING:
    from ..core.pipeline import ScreenPipeline
    from ..stock.stock import Stock

DEFAULT_NBITS = 2048
DEFAULT_PATH_MAX = 7

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK64 = 0xFFFFFFFFFFFFFFFF


@lru_cache(maxsize=1 << 18)
def fnv1a_64(text: str) -> int:
    """64 位元 FNV-1a"""
    value = FNV_OFFSET
    for byte in text.encode("ascii"):
        value ^= byte
        value = (value * FNV_PRIME) & MASK64
    return value


def _atom_label(molecule: Molecule, index: int) -> str:
    atom = molecule.atoms[index]
    label = atom.element + ("a" if atom.aromatic else "")
    if atom.formal_charge:
        label += f"{atom.formal_charge:+d}"
    return label


def check_params(nbits: int, path_max: int):
    if nbits <= 0 or nbits % 64:
        raise ConfigurationError(f"nbits 必須是 64 的正整數倍: {nbits}")
    if path_max < 0:
        raise ConfigurationError(f"path_max 不可為負: {path_max}")


@dataclass(frozen=True, eq=False)
class PatternFingerprint:
    """固定寬度的指紋位元向量

    bits 為 nbits // 64 個 uint64 字組，第 i 位元位於字組 i // 64 的第 i % 64 位。
    """

    bits: np.ndarray
    nbits: int = DEFAULT_NBITS
    path_max: int = DEFAULT_PATH_MAX

    def __eq__(self, other) -> bool:
        if not isinstance(other, PatternFingerprint):
            return NotImplemented
        return (
            self.nbits == other.nbits
            and self.path_max == other.path_max
            and np.array_equal(self.bits, other.bits)
        )

    __hash__ = None

    @property
    def popcount(self) -> int:
        return int(sum(bin(int(word)).count("1") for word in self.bits))

    def contains(self, other: "PatternFingerprint") -> bool:
        """other 的所有位元都在 self 中"""
        return not np.any(other.bits & ~self.bits)

    def to_bytes(self) -> bytes:
        return self.bits.astype("<u8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, nbits: int, path_max: int) -> "PatternFingerprint":
        bits = np.frombuffer(data, dtype="<u8").astype(np.uint64)
        if bits.size != nbits // 64:
            raise ValueError(f"指紋長度不符: {bits.size * 64} != {nbits}")
        return cls(bits=bits, nbits=nbits, path_max=path_max)

    @classmethod
    def from_indices(cls, indices: Iterable[int], nbits: int, path_max: int) -> "PatternFingerprint":
        value = 0
        for i in indices:
            value |= 1 << i
        bits = np.frombuffer(value.to_bytes(nbits // 8, "little"), dtype="<u8").astype(np.uint64)
        return cls(bits=bits, nbits=nbits, path_max=path_max)


def path_features(molecule: Molecule, path_max: int = DEFAULT_PATH_MAX) -> Set[str]:
    """列出分子的特徵字串（路徑特徵 P:、環原子 R:、環鍵 RB:）"""
    eligible = [i for i, atom in enumerate(molecule.atoms) if not atom.is_attachment]
    labels = {i: _atom_label(molecule, i) for i in eligible}
    features: Set[str] = set()

    for start in eligible:
        stack = [(start, (start,), [labels[start]])]
        while stack:
            current, visited, tokens = stack.pop()
            forward = "|".join(tokens)
            backward = "|".join(reversed(tokens))
            features.add("P:" + min(forward, backward))
            if len(visited) - 1 >= path_max:
                continue
            for nbr, order in molecule.neighbors(current):
                if nbr in visited or nbr not in labels:
                    continue
                stack.append((nbr, visited + (nbr,), tokens + [order.code, labels[nbr]]))

    for i in eligible:
        if molecule.ring_atom_flags[i]:
            features.add("R:" + labels[i])
    for index, bond in enumerate(molecule.bonds):
        if not molecule.ring_bond_flags[index]:
            continue
        if bond.begin not in labels or bond.end not in labels:
            continue
        a, b = sorted((labels[bond.begin], labels[bond.end]))
        features.add(f"RB:{a}|{bond.order.code}|{b}")
    return features


def fingerprint(
    molecule: Molecule,
    nbits: int = DEFAULT_NBITS,
    path_max: int = DEFAULT_PATH_MAX,
) -> PatternFingerprint:
    """計算分子（或含連接點的片段）的指紋

    Args:
        molecule: 分子
        nbits: 位元寬度，須為 64 的倍數
        path_max: 路徑最大鍵數

    Returns:
        PatternFingerprint
    """
    check_params(nbits, path_max)
    indices = {fnv1a_64(feature) % nbits for feature in path_features(molecule, path_max)}
    return PatternFingerprint.from_indices(indices, nbits, path_max)


@dataclass(frozen=True)
class QueryProfile:
    """篩選時用到的查詢量測"""

    heavy_atoms: int
    rings: int
    fp: PatternFingerprint

    @classmethod
    def of(cls, fragment: Molecule, nbits: int, path_max: int) -> "QueryProfile":
        return cls(
            heavy_atoms=fragment.heavy_atom_count,
            rings=fragment.ring_count,
            fp=fingerprint(fragment, nbits, path_max),
        )


def screen_candidates(
    fragment: Molecule,
    stock: "Stock",
    prior: Optional[Iterable[int]] = None,
    pipeline: Optional["ScreenPipeline"] = None,
) -> FrozenSet[int]:
    """以性質與指紋篩選候選建構塊

    Args:
        fragment: 查詢片段
        stock: 庫存
        prior: 先驗候選 id；None 表示整個庫存
        pipeline: 篩選管線，預設為 property -> fingerprint

    Returns:
        通過所有篩選的 id 集合（真實匹配集合的超集）
    """
    from ..core.pipeline import default_pipeline

    profile = QueryProfile.of(fragment, stock.nbits, stock.path_max)
    if prior is None:
        ids = np.arange(len(stock), dtype=np.int64)
    else:
        ids = np.fromiter(sorted(prior), dtype=np.int64)
    active = pipeline if pipeline is not None else default_pipeline()
    kept: List[int] = active.apply(profile, stock, ids).tolist()
    return frozenset(kept)
