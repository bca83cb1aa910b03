"""嚴格子結構匹配

查詢分子的連接點（'*'）不參與映射，只提供「額外重原子鄰居」的名額：
內部原子 q 映射到目標原子 t 時，heavy_degree(t) = 內部鄰居數(q) + x，
0 ≤ x ≤ 連接點數(q)；x 個額外鄰居不可是其他內部原子的像（誘導子圖）。
沒有連接點的位置不允許任何額外分支，連接點也可以由氫滿足。
"""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence

from ..molgraph.model import BondOrder, Molecule
from ..utils.exceptions import QueryHasNoInternalAtomsError


@dataclass(frozen=True)
class PatternAtomConstraint:
    """查詢內部原子的匹配條件"""

    element: str
    aromatic: bool
    formal_charge: int
    required_internal_degree: int
    attachment_slots: int
    in_ring: bool = False

    def admits(self, target: Molecule, index: int, degree: int) -> bool:
        atom = target.atoms[index]
        return (
            atom.element == self.element
            and atom.aromatic == self.aromatic
            and atom.formal_charge == self.formal_charge
            and self.required_internal_degree <= degree <= self.required_internal_degree + self.attachment_slots
            and (not self.in_ring or target.ring_atom_flags[index])
        )


class SubstructureMatcher:
    """編譯後的查詢，可重複對多個目標分子匹配

    搜尋順序：先取候選域最小的原子，之後每次挑與已排序原子相鄰、
    候選域最小者，候選只從父原子之像的鄰居中產生（VF2 式回溯）。

    Args:
        query: 查詢分子
        use_attachments: False 時 '*' 也當成一般原子（同構判斷用）
    """

    def __init__(self, query: Molecule, use_attachments: bool = True):
        self.query = query
        self.use_attachments = use_attachments
        if use_attachments:
            self.positions = [i for i, atom in enumerate(query.atoms) if not atom.is_attachment]
        else:
            self.positions = list(range(len(query.atoms)))
        if not self.positions:
            raise QueryHasNoInternalAtomsError("查詢分子沒有內部原子")

        slot_of = {index: pos for pos, index in enumerate(self.positions)}
        self.adjacency: List[Dict[int, BondOrder]] = []
        self.constraints: List[PatternAtomConstraint] = []
        for index in self.positions:
            internal: Dict[int, BondOrder] = {}
            slots = 0
            for nbr, order in query.neighbors(index):
                if nbr in slot_of:
                    internal[slot_of[nbr]] = order
                else:
                    slots += 1
            atom = query.atoms[index]
            self.adjacency.append(internal)
            self.constraints.append(
                PatternAtomConstraint(
                    element=atom.element,
                    aromatic=atom.aromatic,
                    formal_charge=atom.formal_charge,
                    required_internal_degree=len(internal),
                    attachment_slots=slots,
                    in_ring=query.ring_atom_flags[index],
                )
            )
        self._counts = self._element_counts()

    def __len__(self) -> int:
        return len(self.positions)

    def _element_counts(self) -> Dict[tuple, int]:
        counts: Dict[tuple, int] = {}
        for c in self.constraints:
            key = (c.element, c.aromatic)
            counts[key] = counts.get(key, 0) + 1
        return counts

    def _target_degree(self, target: Molecule, index: int) -> int:
        if self.use_attachments:
            return target.heavy_degree(index)
        return target.degree(index)

    def _domains(self, target: Molecule) -> Optional[List[List[int]]]:
        pool = [
            i
            for i, atom in enumerate(target.atoms)
            if not (self.use_attachments and atom.is_attachment)
        ]
        if len(pool) < len(self.positions):
            return None
        available: Dict[tuple, int] = {}
        for i in pool:
            atom = target.atoms[i]
            key = (atom.element, atom.aromatic)
            available[key] = available.get(key, 0) + 1
        for key, needed in self._counts.items():
            if available.get(key, 0) < needed:
                return None
        degrees = {i: self._target_degree(target, i) for i in pool}
        domains = []
        for constraint in self.constraints:
            domain = [i for i in pool if constraint.admits(target, i, degrees[i])]
            if not domain:
                return None
            domains.append(domain)
        return domains

    def _plan(self, domains: Sequence[Sequence[int]]):
        """回傳 (順序, 父節點)；父節點為已排序的相鄰查詢原子"""
        n = len(self.positions)
        order: List[int] = []
        parent: List[Optional[int]] = [None] * n
        placed = [False] * n
        while len(order) < n:
            frontier = [
                q for q in range(n) if not placed[q] and any(placed[p] for p in self.adjacency[q])
            ]
            pool = frontier or [q for q in range(n) if not placed[q]]
            q = min(pool, key=lambda x: (len(domains[x]), x))
            if frontier:
                parent[q] = min(
                    (p for p in self.adjacency[q] if placed[p]),
                    key=lambda p: order.index(p),
                )
            placed[q] = True
            order.append(q)
        return order, parent

    def iter_embeddings(self, target: Molecule) -> Iterator[Dict[int, int]]:
        """逐一產生嵌入（查詢原子索引 → 目標原子索引）"""
        domains = self._domains(target)
        if domains is None:
            return
        order, parent = self._plan(domains)
        domain_sets = [set(d) for d in domains]
        n = len(order)
        mapping = [-1] * n
        inverse: Dict[int, int] = {}

        def feasible(q: int, t: int) -> bool:
            seen = 0
            for t2, order_t in target.neighbors(t):
                q2 = inverse.get(t2)
                if q2 is None:
                    continue
                expected = self.adjacency[q].get(q2)
                if expected is None or expected != order_t:
                    return False
                seen += 1
            mapped = sum(1 for q2 in self.adjacency[q] if mapping[q2] >= 0)
            return seen == mapped

        def extend(depth: int):
            if depth == n:
                yield {self.positions[q]: mapping[q] for q in range(n)}
                return
            q = order[depth]
            p = parent[q]
            if p is None:
                candidates = domains[q]
            else:
                wanted = self.adjacency[q][p]
                candidates = [
                    t2 for t2, bond in target.neighbors(mapping[p]) if bond == wanted and t2 in domain_sets[q]
                ]
            for t in candidates:
                if t in inverse or not feasible(q, t):
                    continue
                mapping[q] = t
                inverse[t] = q
                yield from extend(depth + 1)
                del inverse[t]
                mapping[q] = -1

        yield from extend(0)

    def matches(self, target: Molecule) -> bool:
        for _ in self.iter_embeddings(target):
            return True
        return False

    def count(self, target: Molecule, limit: Optional[int] = None) -> int:
        total = 0
        for _ in self.iter_embeddings(target):
            total += 1
            if limit is not None and total >= limit:
                break
        return total


def match_substructure(query: Molecule, target: Molecule) -> bool:
    """嚴格子結構匹配

    Args:
        query: 含連接點的查詢片段
        target: 不含連接點的目標分子

    Returns:
        是否存在符合嚴格條件的單射嵌入

    Raises:
        QueryHasNoInternalAtomsError: 查詢只有萬用原子
    """
    return SubstructureMatcher(query).matches(target)


def is_isomorphic(a: Molecule, b: Molecule) -> bool:
    """圖同構（元素、芳香性、電荷、鍵級皆相同）；'*' 視為一般原子"""
    if len(a.atoms) != len(b.atoms) or len(a.bonds) != len(b.bonds):
        return False
    if not a.atoms:
        return True
    return SubstructureMatcher(a, use_attachments=False).matches(b)


def count_embeddings(query: Molecule, target: Molecule, limit: Optional[int] = None) -> int:
    """計算相異的嚴格嵌入數，最多到 limit"""
    return SubstructureMatcher(query).count(target, limit)
