"""不含任何啟發式的參考實作（測試用）"""

from typing import Dict, Iterator, List, Sequence, Set, Tuple

from ..molgraph.model import Molecule
from ..utils import bitset
from ..utils.exceptions import QueryHasNoInternalAtomsError


def naive_match(query: Molecule, target: Molecule) -> bool:
    """窮舉回溯的嚴格子結構匹配

    依查詢原子索引順序逐一指派到任意目標重原子，每一步檢查元素、芳香性、
    電荷、度數範圍，以及與已指派原子之間的鍵（誘導子圖、鍵級相同）。
    """
    internal = [i for i, atom in enumerate(query.atoms) if not atom.is_attachment]
    if not internal:
        raise QueryHasNoInternalAtomsError("查詢分子沒有內部原子")
    pool = [i for i, atom in enumerate(target.atoms) if not atom.is_attachment]

    required: Dict[int, int] = {}
    slots: Dict[int, int] = {}
    for q in internal:
        heavy = sum(1 for nbr, _ in query.neighbors(q) if not query.atoms[nbr].is_attachment)
        required[q] = heavy
        slots[q] = query.degree(q) - heavy

    assignment: Dict[int, int] = {}

    def compatible(q: int, t: int) -> bool:
        qa, ta = query.atoms[q], target.atoms[t]
        if (qa.element, qa.aromatic, qa.formal_charge) != (ta.element, ta.aromatic, ta.formal_charge):
            return False
        extra = target.heavy_degree(t) - required[q]
        if extra < 0 or extra > slots[q]:
            return False
        for q2, t2 in assignment.items():
            if query.bond_order(q, q2) != target.bond_order(t, t2):
                return False
        return True

    def assign(position: int) -> bool:
        if position == len(internal):
            return True
        q = internal[position]
        used = set(assignment.values())
        for t in pool:
            if t in used or not compatible(q, t):
                continue
            assignment[q] = t
            if assign(position + 1):
                return True
            del assignment[q]
        return False

    return assign(0)


def all_connected_subsets(k: int, edges: Sequence[Tuple[int, int, int]]) -> List[int]:
    """列出片段鄰接圖的所有連通子集（位元集合），由單點逐步擴展

    Args:
        k: 節點數
        edges: (a, b, bond_id) 邊列表

    Returns:
        依 (大小, 位元集合) 排序
    """
    neighbors = [0] * k
    for a, b, _ in edges:
        neighbors[a] |= 1 << b
        neighbors[b] |= 1 << a

    found: Set[int] = {1 << i for i in range(k)}
    frontier = set(found)
    while frontier:
        grown: Set[int] = set()
        for mask in frontier:
            reach = 0
            for i in bitset.iter_bits(mask):
                reach |= neighbors[i]
            for j in bitset.iter_bits(reach & ~mask):
                child = mask | (1 << j)
                if child not in found:
                    grown.add(child)
        found |= grown
        frontier = grown
    return sorted(found, key=lambda m: (bitset.popcount(m), m))


def set_partitions(k: int) -> Iterator[List[int]]:
    """列出 {0..k-1} 的所有集合分割（以區塊位元集合表示）"""
    if k == 0:
        yield []
        return
    for partition in set_partitions(k - 1):
        item = 1 << (k - 1)
        for index in range(len(partition)):
            yield partition[:index] + [partition[index] | item] + partition[index + 1 :]
        yield partition + [item]
