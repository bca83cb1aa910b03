"""測試分子圖的環數與環鍵旗標"""

import random
from collections import deque

import pytest

from src.molgraph.model import Atom, Bond, Molecule
from src.molgraph.smiles import parse_smiles
from src.utils.exceptions import MoleculeError


def _random_graph(rng: random.Random) -> Molecule:
    n = rng.randint(1, 12)
    density = rng.random() * 0.5
    bonds = [Bond(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < density]
    return Molecule([Atom(element="C") for _ in range(n)], bonds)


def _spanning_forest_cycles(molecule: Molecule) -> int:
    """union-find：不在生成森林中的鍵數"""
    parent = list(range(len(molecule.atoms)))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    closing = 0
    for bond in molecule.bonds:
        a, b = root(bond.begin), root(bond.end)
        if a == b:
            closing += 1
        else:
            parent[a] = b
    return closing


def _still_connected_without(molecule: Molecule, skip: int) -> bool:
    bond = molecule.bonds[skip]
    seen = {bond.begin}
    queue = deque([bond.begin])
    while queue:
        i = queue.popleft()
        for index, other in enumerate(molecule.bonds):
            if index == skip or i not in other.endpoints:
                continue
            j = other.other(i)
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return bond.end in seen


class TestRingCount:
    def test_known_molecules(self):
        assert parse_smiles("CCO").ring_count == 0
        assert parse_smiles("c1ccccc1").ring_count == 1
        assert parse_smiles("c1ccc2ccccc2c1").ring_count == 2
        assert parse_smiles("C1CC2CCC1C2").ring_count == 2

    def test_random_graphs(self):
        rng = random.Random(51)
        for _ in range(100):
            molecule = _random_graph(rng)
            assert molecule.ring_count == _spanning_forest_cycles(molecule)

    def test_empty_molecule(self):
        assert Molecule([], []).ring_count == 0


class TestRingBondFlags:
    def test_random_graphs(self):
        rng = random.Random(52)
        for _ in range(100):
            molecule = _random_graph(rng)
            expected = tuple(_still_connected_without(molecule, i) for i in range(len(molecule.bonds)))
            assert molecule.ring_bond_flags == expected

    def test_ring_atoms(self):
        molecule = parse_smiles("c1ccccc1CC")
        assert molecule.ring_atom_flags == (True,) * 6 + (False, False)


class TestMoleculeErrors:
    def test_self_bond(self):
        with pytest.raises(MoleculeError):
            Molecule([Atom(element="C")], [Bond(0, 0)])

    def test_duplicate_bond(self):
        with pytest.raises(MoleculeError):
            Molecule([Atom(element="C"), Atom(element="C")], [Bond(0, 1), Bond(1, 0)])

    def test_missing_atom(self):
        with pytest.raises(MoleculeError):
            Molecule([Atom(element="C")], [Bond(0, 1)])
