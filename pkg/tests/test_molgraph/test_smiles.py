"""測試 SMILES 讀寫"""

import random

import pytest

from src.bench.generators import assemble
from src.matching.matcher import is_isomorphic
from src.molgraph.model import BondOrder
from src.molgraph.smiles import parse_smiles, write_smiles
from src.utils.exceptions import MultiComponentError, SmilesSyntaxError, ValenceError


def _round_trip_corpus(rng: random.Random, count: int):
    for _ in range(count):
        m = assemble(rng, rng.randint(1, 6))
        assert is_isomorphic(m, parse_smiles(write_smiles(m))), write_smiles(m)


class TestParseSmiles:
    """測試 parse_smiles"""

    def test_ethanol(self):
        m = parse_smiles("CCO")
        assert m.heavy_atom_count == 3
        assert len(m.bonds) == 2
        assert all(b.order is BondOrder.SINGLE for b in m.bonds)
        assert m.ring_count == 0
        assert [a.explicit_h for a in m.atoms] == [3, 2, 1]

    def test_benzene(self):
        m = parse_smiles("c1ccccc1")
        assert m.heavy_atom_count == 6
        assert all(a.aromatic for a in m.atoms)
        assert len(m.bonds) == 6
        assert all(b.order is BondOrder.AROMATIC for b in m.bonds)
        assert m.ring_count == 1
        assert all(m.ring_atom_flags)

    def test_unclosed_ring(self):
        with pytest.raises(SmilesSyntaxError):
            parse_smiles("C1CC")

    def test_unbalanced_branch(self):
        with pytest.raises(SmilesSyntaxError):
            parse_smiles("CC(C")

    def test_empty(self):
        with pytest.raises(SmilesSyntaxError):
            parse_smiles("   ")

    def test_unknown_element(self):
        with pytest.raises(SmilesSyntaxError):
            parse_smiles("C[Xx]C")

    def test_multi_component_rejected(self):
        with pytest.raises(MultiComponentError):
            parse_smiles("CC.O")

    def test_valence_error(self):
        with pytest.raises(ValenceError):
            parse_smiles("C(C)(C)(C)(C)C")

    def test_labelled_attachment(self):
        m = parse_smiles("[*:3]CC")
        assert m.atoms[0].is_attachment
        assert m.atoms[0].attachment_bond_id == 3
        assert m.heavy_atom_count == 2
        assert m.atoms[1].explicit_h == 2

    def test_bracket_atom(self):
        m = parse_smiles("[NH4+]")
        assert m.atoms[0].formal_charge == 1
        assert m.atoms[0].explicit_h == 4

    def test_explicit_hydrogen_folded(self):
        m = parse_smiles("[H]C([H])([H])[H]")
        assert len(m.atoms) == 1
        assert m.atoms[0].explicit_h == 4

    def test_biaryl_bond_is_single(self):
        m = parse_smiles("c1ccc(-c2ccccc2)cc1")
        singles = [b for b in m.bonds if b.order is BondOrder.SINGLE]
        assert len(singles) == 1
        assert m.ring_count == 2

    def test_heteroaromatic_hydrogens(self):
        pyridine = parse_smiles("c1ccncc1")
        assert pyridine.atoms[3].explicit_h == 0
        thiophene = parse_smiles("c1ccsc1")
        assert thiophene.atoms[3].explicit_h == 0
        assert thiophene.atoms[0].explicit_h == 1


class TestWriteSmiles:
    """測試 write_smiles"""

    def test_single_atom(self):
        assert write_smiles(parse_smiles("C")) == "C"

    @pytest.mark.parametrize(
        "smiles",
        [
            "CCO",
            "c1ccccc1",
            "CC(=O)Nc1ccccc1",
            "C1CC2CCC1CC2",
            "c1ccc2ccccc2c1",
            "C#N",
            "[NH4+]",
            "c1ccc(-c2ccccc2)cc1",
            "O=S(=O)(N)c1ccccc1",
        ],
    )
    def test_round_trip(self, smiles):
        m = parse_smiles(smiles)
        again = parse_smiles(write_smiles(m))
        assert is_isomorphic(m, again)

    def test_labelled_attachments(self):
        m = parse_smiles("[*:2]C(=O)N[*:5]")
        text = write_smiles(m, label_attachments=True)
        assert "[*:2]" in text and "[*:5]" in text
        assert "[*:" not in write_smiles(m)
        again = parse_smiles(text)
        assert sorted(again.attachment_ids()) == [2, 5]

    def test_random_corpus_round_trip(self):
        _round_trip_corpus(random.Random(7), 100)

    @pytest.mark.slow
    def test_random_corpus_round_trip_full(self):
        _round_trip_corpus(random.Random(8), 1000)
