from abc import ABC, abstractmethod
from typing import Any, Dict, List, Tuple

import networkx as nx
from loguru import logger

from ..molgraph.model import Molecule
from ..molgraph.ops import extract_subgraph
from ..utils.exceptions import FragmentationError
from .decomposition import FragmentDecomposition


class Fragmenter(ABC):
    """片段化器抽象基類"""

    def __init__(self, config: Dict[str, Any]):
        """初始化片段化器

        Args:
            config: 片段化器配置字典
        """
        self.config = config
        self._initialize()

    @abstractmethod
    def _initialize(self):
        """初始化片段化器（載入規則表等）"""
        pass

    @property
    @abstractmethod
    def name(self) -> str:
        """返回片段化器名稱"""
        pass

    @abstractmethod
    def find_cleavage_bonds(self, molecule: Molecule) -> List[Tuple[int, str]]:
        """找出可斷的鍵

        Args:
            molecule: 不含連接點的分子

        Returns:
            依鍵索引排序的 (bond_index, rule_id)
        """
        pass

    def fragment(self, molecule: Molecule) -> FragmentDecomposition:
        """同時切斷所有可斷鍵，產生初始片段與鄰接圖

        斷開後兩端仍在同一連通分量的鍵不切。斷鍵編號從 1 起依鍵索引指派，
        片段依最小原子索引排序。

        Args:
            molecule: 目標分子

        Returns:
            FragmentDecomposition

        Raises:
            FragmentationError: 目標分子含連接點
        """
        if molecule.has_attachments:
            raise FragmentationError("目標分子不可含連接點")

        matched = self.find_cleavage_bonds(molecule)
        graph = nx.Graph()
        graph.add_nodes_from(range(len(molecule.atoms)))
        matched_set = {index for index, _ in matched}
        for index, bond in enumerate(molecule.bonds):
            if index not in matched_set:
                graph.add_edge(bond.begin, bond.end)

        component_of: Dict[int, int] = {}
        for number, component in enumerate(nx.connected_components(graph)):
            for atom in component:
                component_of[atom] = number

        cuts = []
        for index, rule_id in matched:
            bond = molecule.bonds[index]
            if component_of[bond.begin] == component_of[bond.end]:
                logger.debug(f"{self.name}: 鍵 {index} 不會分開分子，保留")
                continue
            cuts.append((index, rule_id))

        if not cuts:
            return FragmentDecomposition(
                target=molecule,
                fragments=(molecule,),
                atom_map=(tuple(range(len(molecule.atoms))),),
            )

        bond_ids = {index: number for number, (index, _) in enumerate(cuts, start=1)}
        cut_graph = nx.Graph()
        cut_graph.add_nodes_from(range(len(molecule.atoms)))
        for index, bond in enumerate(molecule.bonds):
            if index not in bond_ids:
                cut_graph.add_edge(bond.begin, bond.end)
        groups = sorted((sorted(c) for c in nx.connected_components(cut_graph)), key=lambda g: g[0])

        fragment_of = {atom: number for number, group in enumerate(groups) for atom in group}
        fragments = tuple(extract_subgraph(molecule, group, bond_ids) for group in groups)
        adjacency = []
        for index, bond_id in bond_ids.items():
            bond = molecule.bonds[index]
            a, b = sorted((fragment_of[bond.begin], fragment_of[bond.end]))
            adjacency.append((a, b, bond_id))
        adjacency.sort(key=lambda edge: edge[2])

        logger.debug(f"{self.name}: {len(cuts)} 個斷鍵，{len(fragments)} 個片段")
        return FragmentDecomposition(
            target=molecule,
            fragments=fragments,
            adjacency=tuple(adjacency),
            rule_per_bond={bond_ids[index]: rule_id for index, rule_id in cuts},
            atom_map=tuple(tuple(group) for group in groups),
        )
