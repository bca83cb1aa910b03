"""由有效組合建構解（精確覆蓋）"""

from typing import Dict, Iterable, List, Tuple, Union

from ..utils import bitset
from .results import FragmentCombination, Solution

DEFAULT_MAX_SOLUTIONS = 10000


def enumerate_solutions(
    valid: Iterable[Union[int, FragmentCombination]],
    k: int,
    cap: int = DEFAULT_MAX_SOLUTIONS,
) -> Tuple[List[Solution], bool]:
    """列出 {0..k-1} 由有效組合構成的所有分割

    每一步選最低的未覆蓋索引，依序嘗試以它為最低位元的區塊（大的先）。
    找到 cap 個後停止。

    Args:
        valid: 有效組合（成員位元集合或 FragmentCombination）
        k: 初始片段數
        cap: 解的數量上限

    Returns:
        (依 (大小, 區塊位元集合) 排序的解, 是否被截斷)
    """
    by_lowest: Dict[int, List[int]] = {}
    for item in valid:
        members = item if isinstance(item, int) else item.members
        if members <= 0:
            continue
        by_lowest.setdefault(bitset.lowest(members), []).append(members)
    for blocks in by_lowest.values():
        blocks.sort(key=lambda m: (-bitset.popcount(m), m))

    full = bitset.full_mask(k)
    found: List[Solution] = []
    truncated = False
    chosen: List[int] = []

    def cover(covered: int) -> bool:
        """回傳 False 表示已達上限需停止"""
        nonlocal truncated
        if covered == full:
            if len(found) >= cap:
                truncated = True
                return False
            found.append(Solution.of(chosen))
            return True
        lowest = bitset.lowest(~covered & full)
        for block in by_lowest.get(lowest, ()):
            if block & covered:
                continue
            chosen.append(block)
            keep_going = cover(covered | block)
            chosen.pop()
            if not keep_going:
                return False
        return True

    if k > 0:
        cover(0)
    found.sort(key=lambda s: s.sort_key)
    return found, truncated
