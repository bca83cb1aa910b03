"""分子圖基本運算：量測、合併、抽取子圖、封端"""

from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .model import Atom, Bond, BondOrder, Molecule
from .smiles import DEFAULT_VALENCES
from ..utils.exceptions import NoSharedBondError


def measures(molecule: Molecule) -> Tuple[int, int]:
    """回傳 (重原子數, 環數)，連接點原子不計"""
    return molecule.heavy_atom_count, molecule.ring_count


def merge(a: Molecule, b: Molecule, shared_bond_ids: Iterable[int]) -> Molecule:
    """沿共用斷鍵合併兩個片段

    共用編號的連接點原子會被刪除，兩側錨原子以原本的鍵級重新相連；
    其餘連接點保留。

    Args:
        a: 片段 A
        b: 片段 B
        shared_bond_ids: 兩側皆恰有一個連接點攜帶的斷鍵編號

    Returns:
        合併後的分子

    Raises:
        NoSharedBondError: 編號集合為空或某側缺少該編號
    """
    shared = set(shared_bond_ids)
    if not shared:
        raise NoSharedBondError("沒有提供共用的斷鍵編號")
    for bond_id in sorted(shared):
        for side, molecule in (("A", a), ("B", b)):
            if len(molecule.attachment_by_id(bond_id)) != 1:
                raise NoSharedBondError(f"片段 {side} 沒有恰好一個編號 {bond_id} 的連接點")
    return join([a, b], shared)


def join(molecules: Sequence[Molecule], internal_ids: Set[int]) -> Molecule:
    """一次合併多個片段；internal_ids 中每個編號須恰好出現兩次

    原子依輸入片段順序排列，被消去的連接點略過；重建的鍵接在最後。
    """
    atoms: List[Atom] = []
    bonds: List[Bond] = []
    ends: Dict[int, List[Tuple[int, BondOrder]]] = {}

    for molecule in molecules:
        local: Dict[int, int] = {}
        for index, atom in enumerate(molecule.atoms):
            if atom.is_attachment and atom.attachment_bond_id in internal_ids:
                continue
            local[index] = len(atoms)
            atoms.append(atom)
        for bond in molecule.bonds:
            begin_gone = bond.begin not in local
            end_gone = bond.end not in local
            if begin_gone or end_gone:
                anchor = bond.end if begin_gone else bond.begin
                wildcard = bond.begin if begin_gone else bond.end
                bond_id = molecule.atoms[wildcard].attachment_bond_id
                ends.setdefault(bond_id, []).append((local[anchor], bond.order))
                continue
            bonds.append(Bond(local[bond.begin], local[bond.end], bond.order))

    for bond_id in sorted(ends):
        pair = ends[bond_id]
        if len(pair) != 2:
            raise NoSharedBondError(f"斷鍵編號 {bond_id} 出現 {len(pair)} 次，應為 2 次")
        (left, order), (right, _) = pair
        bonds.append(Bond(left, right, order))
    return Molecule(atoms, bonds)


def extract_subgraph(
    molecule: Molecule,
    atom_indices: Sequence[int],
    bond_ids: Optional[Mapping[int, int]] = None,
) -> Molecule:
    """抽取誘導子圖；每條跨出邊界的鍵在內側補一個連接點

    Args:
        molecule: 來源分子
        atom_indices: 保留的原子（輸出依此順序）
        bond_ids: 來源鍵索引 → 斷鍵編號；未提供則連接點不帶編號

    Returns:
        含連接點的子圖分子
    """
    keep = {index: position for position, index in enumerate(atom_indices)}
    atoms = [molecule.atoms[i] for i in atom_indices]
    bonds: List[Bond] = []
    boundary: List[Tuple[int, int, BondOrder]] = []
    for bond_index, bond in enumerate(molecule.bonds):
        inside_begin = bond.begin in keep
        inside_end = bond.end in keep
        if inside_begin and inside_end:
            bonds.append(Bond(keep[bond.begin], keep[bond.end], bond.order))
        elif inside_begin or inside_end:
            anchor = bond.begin if inside_begin else bond.end
            outside = bond.end if inside_begin else bond.begin
            if molecule.atoms[outside].is_attachment:
                boundary.append((keep[anchor], -1 - outside, bond.order))
            else:
                boundary.append((keep[anchor], bond_index, bond.order))
    for anchor, source, order in sorted(boundary):
        if source < 0:
            atoms.append(molecule.atoms[-1 - source])
        else:
            bond_id = bond_ids.get(source) if bond_ids is not None else None
            atoms.append(Atom.attachment(bond_id))
        bonds.append(Bond(anchor, len(atoms) - 1, order))
    return Molecule(atoms, bonds)


def cap_attachments(molecule: Molecule, substituent: Optional[str] = None) -> Molecule:
    """把連接點換成氫（預設）或單鍵相連的取代原子

    Args:
        molecule: 含連接點的分子
        substituent: None 表示補氫；"C" 等元素符號表示接上該原子並補滿氫

    Returns:
        不含連接點的分子
    """
    if substituent is None:
        atoms = list(molecule.atoms)
        removed = set()
        for index, atom in enumerate(molecule.atoms):
            if not atom.is_attachment:
                continue
            removed.add(index)
            for anchor, order in molecule.neighbors(index):
                gain = 1 if order is BondOrder.AROMATIC else order.value
                atoms[anchor] = atoms[anchor].with_hydrogens(atoms[anchor].explicit_h + gain)
        remap = {}
        kept = []
        for index, atom in enumerate(atoms):
            if index not in removed:
                remap[index] = len(kept)
                kept.append(atom)
        bonds = [
            Bond(remap[b.begin], remap[b.end], b.order)
            for b in molecule.bonds
            if b.begin in remap and b.end in remap
        ]
        return Molecule(kept, bonds)

    valence = DEFAULT_VALENCES[substituent][0]
    atoms = list(molecule.atoms)
    for index, atom in enumerate(molecule.atoms):
        if not atom.is_attachment:
            continue
        order = molecule.neighbors(index)[0][1] if molecule.degree(index) else BondOrder.SINGLE
        used = 1 if order is BondOrder.AROMATIC else order.value
        atoms[index] = Atom(element=substituent, explicit_h=max(valence - used, 0))
    return Molecule(atoms, molecule.bonds)


def relabel_attachments(molecule: Molecule, start: int = 1) -> Molecule:
    """依原子順序為連接點重新編號，從 start 起"""
    atoms = []
    next_id = start
    for atom in molecule.atoms:
        if atom.is_attachment:
            atoms.append(atom.with_bond_id(next_id))
            next_id += 1
        else:
            atoms.append(atom)
    return molecule.with_atoms(atoms)


def internal_indices(molecule: Molecule) -> List[int]:
    return [i for i, atom in enumerate(molecule.atoms) if not atom.is_attachment]
