"""合成測試資料：隨機目標、玩具庫存、子結構查詢與寡聚物系列

所有函式都接受呼叫端提供的 random.Random，不使用全域亂數狀態。
"""

import random
from dataclasses import replace
from typing import Callable, Dict, Iterable, List, Optional, Sequence

from ..core.registry import registry
from ..fragmenters.base import Fragmenter
from ..fragmenters.decomposition import combination_pattern
from ..molgraph.model import Atom, Bond, Molecule
from ..molgraph.ops import cap_attachments, extract_subgraph, internal_indices, merge
from ..molgraph.smiles import parse_smiles, write_smiles
from ..oracle.naive import all_connected_subsets
from ..utils import bitset
from ..utils.exceptions import FragmentationError

# 模板中的 [*:1]、[*:2]、[*:3] 是區域編號，組裝時換成全域斷鍵編號
ARYL_TERMINALS = (
    "c1ccc([*:1])cc1",
    "c1ccc([*:1])nc1",
    "c1ccc([*:1])s1",
    "c1ccc([*:1])o1",
    "c1cnc([*:1])nc1",
)
ARYL_LINKERS = (
    "c1cc([*:1])ccc1[*:2]",
    "c1cc([*:1])cc([*:2])c1",
    "c1cc([*:1])ncc1[*:2]",
    "c1cc([*:1])sc1[*:2]",
    "c1cnc([*:1])nc1[*:2]",
)
ARYL_BRANCHES = ("c1c([*:1])cc([*:2])cc1[*:3]",)
LINKERS = (
    "[*:1]C[*:2]",
    "[*:1]C(=O)N[*:2]",
    "[*:1]NC(=O)[*:2]",
    "[*:1]CO[*:2]",
    "[*:1]OC[*:2]",
    "[*:1]CN[*:2]",
)
SUBSTITUENTS = ("[*:1]C", "[*:1]F", "[*:1]Cl", "[*:1]OC", "[*:1]C(=O)O", "[*:1]N")
# 目錄型背景分子的單元：脂肪環、雜原子連接基與常見官能基
CATALOGUE_TERMINALS = (
    "C1CCN(CC1)[*:1]",
    "C1COCCN1[*:1]",
    "C1CC1[*:1]",
    "C1CCOC1[*:1]",
    "C1CCCC1[*:1]",
    "[*:1]C#N",
    "[*:1]Br",
    "[*:1]C(F)(F)F",
    "[*:1]S(=O)(=O)C",
    "[*:1]C(=O)OCC",
    "[*:1]CC(C)C",
    "[*:1]OCC",
)
CATALOGUE_LINKERS = (
    "[*:1]C1CCC([*:2])CC1",
    "[*:1]N1CCN([*:2])CC1",
    "[*:1]C1CCN([*:2])CC1",
    "[*:1]CC[*:2]",
    "[*:1]S(=O)(=O)N[*:2]",
    "[*:1]C(=O)[*:2]",
    "[*:1]OCCO[*:2]",
)

_TEMPLATES: Dict[str, Molecule] = {}


def _template(smiles: str) -> Molecule:
    if smiles not in _TEMPLATES:
        _TEMPLATES[smiles] = parse_smiles(smiles)
    return _TEMPLATES[smiles]


def _instantiate(smiles: str, ids: Sequence[int]) -> Molecule:
    """把模板的區域編號 i 換成 ids[i-1]"""
    unit = _template(smiles)
    atoms = [
        atom.with_bond_id(ids[atom.attachment_bond_id - 1]) if atom.is_attachment else atom
        for atom in unit.atoms
    ]
    return unit.with_atoms(atoms)


def _open_ids(molecule: Molecule) -> List[int]:
    return sorted(molecule.attachment_ids())


class _Assembler:
    """以 molgraph.merge 逐個接上結構單元"""

    def __init__(self, rng: random.Random, first: str):
        self.rng = rng
        self.next_id = 1
        self.molecule = self._fresh(first, None)

    def _fresh(self, smiles: str, shared: Optional[int]) -> Molecule:
        slots = smiles.count("[*:")
        ids = []
        for slot in range(slots):
            if slot == 0 and shared is not None:
                ids.append(shared)
            else:
                ids.append(self.next_id)
                self.next_id += 1
        return _instantiate(smiles, ids)

    def attach(self, smiles: str) -> bool:
        open_ids = _open_ids(self.molecule)
        if not open_ids:
            return False
        shared = self.rng.choice(open_ids)
        unit = self._fresh(smiles, shared)
        self.molecule = merge(self.molecule, unit, {shared})
        return True

    def finish(self, substituent_rate: float = 0.3) -> Molecule:
        for bond_id in _open_ids(self.molecule):
            if self.rng.random() < substituent_rate:
                unit = _instantiate(self.rng.choice(SUBSTITUENTS), [bond_id])
                self.molecule = merge(self.molecule, unit, {bond_id})
        return cap_attachments(self.molecule)


def assemble(rng: random.Random, units: int) -> Molecule:
    """隨機組裝 units 個結構單元（芳環、連接基）成為單一組分的分子"""
    assembler = _Assembler(rng, rng.choice(ARYL_LINKERS + ARYL_BRANCHES))
    for _ in range(max(units - 1, 0)):
        roll = rng.random()
        if roll < 0.45:
            pool = ARYL_LINKERS
        elif roll < 0.55:
            pool = ARYL_BRANCHES
        elif roll < 0.85:
            pool = LINKERS
        else:
            pool = ARYL_TERMINALS
        if not assembler.attach(rng.choice(pool)):
            break
    return assembler.finish()


def catalogue_molecule(rng: random.Random, units: Optional[int] = None) -> Molecule:
    """目錄型建構塊：以脂肪環與官能基為主，約六分之一的單元為芳環"""
    units = units if units is not None else rng.randint(2, 5)
    assembler = _Assembler(rng, rng.choice(CATALOGUE_LINKERS + ARYL_LINKERS[:1]))
    for _ in range(units - 1):
        roll = rng.random()
        if roll < 0.4:
            pool = CATALOGUE_LINKERS
        elif roll < 0.85:
            pool = CATALOGUE_TERMINALS
        else:
            pool = ARYL_TERMINALS + ARYL_LINKERS
        if not assembler.attach(rng.choice(pool)):
            break
    return assembler.finish()


def _assembled(rng: random.Random) -> Molecule:
    return assemble(rng, rng.randint(1, 4))


def _default_fragmenter(fragmenter: Optional[Fragmenter]) -> Fragmenter:
    return fragmenter or registry.create_fragmenter("brics_like", {})


def random_target(
    rng: random.Random,
    min_fragments: int = 2,
    max_fragments: int = 8,
    max_units: int = 7,
    fragmenter: Optional[Fragmenter] = None,
    attempts: int = 500,
    min_heavy: int = 0,
    max_heavy: Optional[int] = None,
) -> Molecule:
    """產生片段數落在 [min_fragments, max_fragments] 的隨機目標

    另可限制重原子數落在 [min_heavy, max_heavy]。

    Raises:
        FragmentationError: attempts 次內找不到符合的目標
    """
    fragmenter = _default_fragmenter(fragmenter)
    for _ in range(attempts):
        molecule = assemble(rng, rng.randint(1, max_units))
        heavy = molecule.heavy_atom_count
        if heavy < min_heavy or (max_heavy is not None and heavy > max_heavy):
            continue
        k = fragmenter.fragment(molecule).k
        if min_fragments <= k <= max_fragments:
            return molecule
    raise FragmentationError(
        f"{attempts} 次嘗試內找不到 {min_fragments}-{max_fragments} 個片段的目標"
    )


def random_targets(rng: random.Random, count: int, **kwargs) -> List[Molecule]:
    return [random_target(rng, **kwargs) for _ in range(count)]


def _add_methyl(molecule: Molecule, index: int) -> Molecule:
    atoms = list(molecule.atoms)
    atoms[index] = atoms[index].with_hydrogens(atoms[index].explicit_h - 1)
    atoms.append(Atom(element="C", explicit_h=3))
    return Molecule(atoms, list(molecule.bonds) + [Bond(index, len(atoms) - 1)])


def _decoy(rng: random.Random, molecule: Molecule) -> Optional[Molecule]:
    """在一個帶氫的原子上多接一個甲基"""
    sites = [i for i, atom in enumerate(molecule.atoms) if atom.explicit_h > 0]
    if not sites:
        return None
    return _add_methyl(molecule, rng.choice(sites))


def random_stock(
    rng: random.Random,
    targets: Iterable[Molecule],
    size: int,
    fragmenter: Optional[Fragmenter] = None,
    decoy_rate: float = 0.2,
    unrelated_rate: float = 0.2,
    max_block: int = 3,
    background: Optional[Callable[[random.Random], Molecule]] = None,
) -> List[str]:
    """由目標的片段組合建構玩具庫存（SMILES 列表，不重複）

    1. 每個目標的連通組合（至多 max_block 個片段，另加整個目標）封端後加入，
       連接點隨機補氫或接甲基。
    2. 部分組合另外加一個多餘的甲基，作為嚴格性的誘餌。
    3. 其餘以無關的隨機分子補足 size。

    Args:
        rng: 亂數產生器
        targets: 目標分子
        size: 庫存大小上限
        fragmenter: 片段化器，預設 brics_like
        decoy_rate: 誘餌比例
        unrelated_rate: 無關分子比例
        max_block: 納入的組合最大片段數
        background: 產生無關分子的函式，預設為 1-4 個單元的 assemble
    """
    fragmenter = _default_fragmenter(fragmenter)
    related: List[str] = []
    for target in targets:
        d = fragmenter.fragment(target)
        masks = [
            m for m in all_connected_subsets(d.k, d.adjacency)
            if bitset.popcount(m) <= max_block or m == d.full_mask
        ]
        for members in masks:
            if rng.random() < 0.25:
                continue
            pattern = combination_pattern(d, members)
            capped = cap_attachments(pattern, "C" if rng.random() < 0.3 else None)
            related.append(write_smiles(capped))
            if rng.random() < decoy_rate:
                decoy = _decoy(rng, capped)
                if decoy is not None:
                    related.append(write_smiles(decoy))

    make = background or _assembled
    rng.shuffle(related)
    unrelated_count = max(int(size * unrelated_rate), size - len(related))
    keep = max(size - unrelated_count, 0)
    pool = related[:keep]
    seen = set(pool)
    guard = 0
    while len(seen) < size and guard < size * 20:
        guard += 1
        smiles = write_smiles(make(rng))
        if smiles not in seen:
            seen.add(smiles)
            pool.append(smiles)

    unique: List[str] = []
    emitted = set()
    for smiles in pool:
        if smiles not in emitted:
            emitted.add(smiles)
            unique.append(smiles)
    return unique[:size]


def random_subpattern(rng: random.Random, target: Molecule, size: int) -> Molecule:
    """target 的連通誘導子圖，每條被切斷的鍵變成連接點

    依構造必為 target 的子結構（正例）。
    """
    heavy = internal_indices(target)
    start = rng.choice(heavy)
    chosen = [start]
    members = {start}
    while len(chosen) < min(size, len(heavy)):
        frontier = sorted(
            {nbr for i in chosen for nbr, _ in target.neighbors(i)
             if nbr not in members and not target.atoms[nbr].is_attachment}
        )
        if not frontier:
            break
        pick = rng.choice(frontier)
        members.add(pick)
        chosen.append(pick)
    return extract_subgraph(target, chosen)


def mutate_pattern(rng: random.Random, pattern: Molecule) -> Molecule:
    """把一個內部原子換成另一種元素（通常產生負例）"""
    index = rng.choice(internal_indices(pattern))
    atom = pattern.atoms[index]
    choices = ("C", "N") if atom.aromatic else ("C", "N", "O")
    element = rng.choice([e for e in choices if e != atom.element] or ["N"])
    atoms = list(pattern.atoms)
    atoms[index] = replace(atom, element=element)
    return pattern.with_atoms(atoms)


def oligomer(n: int) -> Molecule:
    """對位相連的 n 聚苯；brics_like 片段化後為 n 個節點的路徑"""
    if n < 1:
        raise ValueError("n 必須至少為 1")
    if n == 1:
        return parse_smiles("c1ccccc1")
    molecule = _instantiate(ARYL_TERMINALS[0], [1])
    for position in range(1, n - 1):
        unit = _instantiate(ARYL_LINKERS[0], [position, position + 1])
        molecule = merge(molecule, unit, {position})
    tail = _instantiate(ARYL_TERMINALS[0], [n - 1])
    return merge(molecule, tail, {n - 1})
