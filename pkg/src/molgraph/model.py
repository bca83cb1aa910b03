"""分子圖資料模型：Atom、Bond、Molecule"""

from collections import Counter
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from ..utils.exceptions import MoleculeError

WILDCARD = "*"


class BondOrder(IntEnum):
    """鍵級；AROMATIC 的價數貢獻為 1.5"""

    SINGLE = 1
    DOUBLE = 2
    TRIPLE = 3
    AROMATIC = 4

    @property
    def valence(self) -> float:
        return 1.5 if self is BondOrder.AROMATIC else float(self.value)

    @property
    def code(self) -> str:
        """指紋與規則表使用的單字元代碼"""
        return "a" if self is BondOrder.AROMATIC else str(self.value)

    @classmethod
    def from_code(cls, code: str) -> "BondOrder":
        if code in ("a", ":"):
            return cls.AROMATIC
        return cls(int(code))


@dataclass(frozen=True)
class Atom:
    """重原子或連接點（萬用原子 '*'）"""

    element: str
    aromatic: bool = False
    formal_charge: int = 0
    explicit_h: int = 0
    is_attachment: bool = False
    attachment_bond_id: Optional[int] = None

    @classmethod
    def attachment(cls, bond_id: Optional[int] = None) -> "Atom":
        return cls(element=WILDCARD, is_attachment=True, attachment_bond_id=bond_id)

    def with_hydrogens(self, explicit_h: int) -> "Atom":
        return replace(self, explicit_h=explicit_h)

    def with_bond_id(self, bond_id: Optional[int]) -> "Atom":
        return replace(self, attachment_bond_id=bond_id)


@dataclass(frozen=True)
class Bond:
    begin: int
    end: int
    order: BondOrder = BondOrder.SINGLE

    @property
    def endpoints(self) -> FrozenSet[int]:
        return frozenset((self.begin, self.end))

    def other(self, index: int) -> int:
        return self.end if index == self.begin else self.begin


class Molecule:
    """不可變的分子圖

    原子依輸入順序排列；建構時計算鄰接表、環鍵旗標與連通分量數。
    連接點原子（is_attachment）不計入重原子數，也不計入 heavy_degree。
    """

    __slots__ = (
        "atoms",
        "bonds",
        "ring_bond_flags",
        "ring_atom_flags",
        "components",
        "_adjacency",
        "_bond_lookup",
    )

    def __init__(self, atoms: Sequence[Atom], bonds: Sequence[Bond]):
        self.atoms: Tuple[Atom, ...] = tuple(atoms)
        self.bonds: Tuple[Bond, ...] = tuple(bonds)

        n = len(self.atoms)
        adjacency: List[List[Tuple[int, BondOrder]]] = [[] for _ in range(n)]
        lookup: Dict[Tuple[int, int], int] = {}
        for index, bond in enumerate(self.bonds):
            a, b = bond.begin, bond.end
            if a == b:
                raise MoleculeError(f"鍵 {index} 的兩端為同一原子 {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise MoleculeError(f"鍵 {index} 指向不存在的原子")
            key = (a, b) if a < b else (b, a)
            if key in lookup:
                raise MoleculeError(f"原子 {a} 與 {b} 之間有重複的鍵")
            lookup[key] = index
            adjacency[a].append((b, bond.order))
            adjacency[b].append((a, bond.order))

        self._adjacency = tuple(tuple(row) for row in adjacency)
        self._bond_lookup = lookup

        graph = nx.Graph()
        graph.add_nodes_from(range(n))
        graph.add_edges_from(lookup.keys())
        bridges = {frozenset(edge) for edge in nx.bridges(graph)} if lookup else set()
        self.ring_bond_flags: Tuple[bool, ...] = tuple(
            bond.endpoints not in bridges for bond in self.bonds
        )
        ring_atoms = [False] * n
        for bond, in_ring in zip(self.bonds, self.ring_bond_flags):
            if in_ring:
                ring_atoms[bond.begin] = ring_atoms[bond.end] = True
        self.ring_atom_flags: Tuple[bool, ...] = tuple(ring_atoms)
        self.components: int = nx.number_connected_components(graph) if n else 0

    def __len__(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        return f"Molecule(atoms={len(self.atoms)}, bonds={len(self.bonds)})"

    def __getstate__(self):
        return (self.atoms, self.bonds)

    def __setstate__(self, state):
        self.__init__(*state)

    @property
    def heavy_atom_count(self) -> int:
        return sum(1 for atom in self.atoms if not atom.is_attachment)

    @property
    def ring_count(self) -> int:
        """環數（圈數 = 鍵數 − 原子數 + 連通分量數）"""
        return len(self.bonds) - len(self.atoms) + self.components

    @property
    def attachment_indices(self) -> Tuple[int, ...]:
        return tuple(i for i, atom in enumerate(self.atoms) if atom.is_attachment)

    @property
    def has_attachments(self) -> bool:
        return any(atom.is_attachment for atom in self.atoms)

    def neighbors(self, index: int) -> Tuple[Tuple[int, BondOrder], ...]:
        return self._adjacency[index]

    def degree(self, index: int) -> int:
        return len(self._adjacency[index])

    def heavy_degree(self, index: int) -> int:
        return sum(1 for nbr, _ in self._adjacency[index] if not self.atoms[nbr].is_attachment)

    def bond_index(self, a: int, b: int) -> Optional[int]:
        return self._bond_lookup.get((a, b) if a < b else (b, a))

    def bond_order(self, a: int, b: int) -> Optional[BondOrder]:
        index = self.bond_index(a, b)
        return None if index is None else self.bonds[index].order

    def is_ring_bond(self, bond_index: int) -> bool:
        return self.ring_bond_flags[bond_index]

    def attachment_by_id(self, bond_id: int) -> List[int]:
        return [
            i
            for i, atom in enumerate(self.atoms)
            if atom.is_attachment and atom.attachment_bond_id == bond_id
        ]

    def attachment_ids(self) -> Tuple[int, ...]:
        return tuple(
            atom.attachment_bond_id
            for atom in self.atoms
            if atom.is_attachment and atom.attachment_bond_id is not None
        )

    def element_counts(self) -> Counter:
        """非連接點原子的 (元素, 芳香) 計數"""
        return Counter((atom.element, atom.aromatic) for atom in self.atoms if not atom.is_attachment)

    def with_atoms(self, atoms: Iterable[Atom]) -> "Molecule":
        return Molecule(tuple(atoms), self.bonds)
