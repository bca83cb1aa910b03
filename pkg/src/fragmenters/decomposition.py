"""片段分解結果與片段組合的 pattern"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Mapping, Tuple

import networkx as nx

from ..molgraph.model import Molecule
from ..molgraph.ops import join
from ..utils import bitset
from ..utils.exceptions import DisconnectedMembersError


@dataclass(frozen=True)
class FragmentDecomposition:
    """初始片段集合 F₁ 與片段鄰接圖

    Attributes:
        target: 被分解的分子
        fragments: 初始片段（連接點帶斷鍵編號），依最小原子索引排序
        adjacency: (片段 a, 片段 b, 斷鍵編號)，a < b，依斷鍵編號排序
        rule_per_bond: 斷鍵編號 → 規則 id
        atom_map: 每個片段對應的目標原子索引
    """

    target: Molecule
    fragments: Tuple[Molecule, ...]
    adjacency: Tuple[Tuple[int, int, int], ...] = ()
    rule_per_bond: Mapping[int, str] = field(default_factory=dict)
    atom_map: Tuple[Tuple[int, ...], ...] = ()

    @property
    def k(self) -> int:
        return len(self.fragments)

    @property
    def full_mask(self) -> int:
        return bitset.full_mask(self.k)

    @cached_property
    def graph(self) -> nx.MultiGraph:
        """片段鄰接多重圖，邊的 key 為斷鍵編號"""
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.k))
        for a, b, bond_id in self.adjacency:
            graph.add_edge(a, b, key=bond_id)
        return graph

    @cached_property
    def neighbor_masks(self) -> Tuple[int, ...]:
        masks = [0] * self.k
        for a, b, _ in self.adjacency:
            masks[a] |= 1 << b
            masks[b] |= 1 << a
        return tuple(masks)

    @property
    def is_acyclic(self) -> bool:
        return len(self.adjacency) == self.k - 1

    def is_connected(self, members: int) -> bool:
        if not members:
            return False
        start = bitset.lowest(members)
        seen = 1 << start
        frontier = seen
        while frontier:
            grown = 0
            for i in bitset.iter_bits(frontier):
                grown |= self.neighbor_masks[i]
            frontier = grown & members & ~seen
            seen |= frontier
        return seen == members

    def internal_bond_ids(self, members: int) -> List[int]:
        return [
            bond_id
            for a, b, bond_id in self.adjacency
            if (members >> a) & 1 and (members >> b) & 1
        ]

    def boundary(self, members: int) -> int:
        """與 members 相鄰但不在其中的片段"""
        grown = 0
        for i in bitset.iter_bits(members):
            grown |= self.neighbor_masks[i]
        return grown & ~members

    def label(self, members: int) -> str:
        """片段組合的短名稱（A、A-B、…），超過 26 個片段時改用數字"""
        indices = bitset.to_indices(members)
        if self.k <= 26:
            return "-".join(chr(ord("A") + i) for i in indices)
        return "-".join(str(i) for i in indices)

    def to_dict(self) -> Dict[str, object]:
        from ..molgraph.smiles import write_smiles

        return {
            "fragments": [write_smiles(f, label_attachments=True) for f in self.fragments],
            "adjacency": [[a, b, bond_id] for a, b, bond_id in self.adjacency],
            "rules": {str(bond_id): rule for bond_id, rule in sorted(self.rule_per_bond.items())},
        }


def combination_pattern(d: FragmentDecomposition, members: int) -> Molecule:
    """合併片段組合的成員，得到單一 pattern 分子

    Args:
        d: 片段分解
        members: 片段索引位元集合

    Returns:
        合併後的分子；組合邊界上的連接點保留

    Raises:
        DisconnectedMembersError: members 為空或在鄰接圖中不連通
    """
    if members <= 0 or members > d.full_mask:
        raise DisconnectedMembersError(f"無效的成員集合: {members:#x}")
    if not d.is_connected(members):
        raise DisconnectedMembersError(f"成員不連通: {d.label(members)}")
    indices = bitset.to_indices(members)
    if len(indices) == 1:
        return d.fragments[indices[0]]
    return join([d.fragments[i] for i in indices], set(d.internal_bond_ids(members)))
