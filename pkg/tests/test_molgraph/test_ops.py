"""測試分子圖運算：量測、合併、抽取子圖、封端"""

import pytest

from src.matching.matcher import is_isomorphic
from src.molgraph.ops import (
    cap_attachments,
    extract_subgraph,
    internal_indices,
    measures,
    merge,
    relabel_attachments,
)
from src.molgraph.smiles import parse_smiles
from src.utils.exceptions import NoSharedBondError


class TestMeasures:
    @pytest.mark.parametrize(
        "smiles, expected",
        [("CCO", (3, 0)), ("c1ccccc1", (6, 1)), ("*C(=O)N*", (3, 0)), ("c1ccc2ccccc2c1", (10, 2))],
    )
    def test_measures(self, smiles, expected):
        assert measures(parse_smiles(smiles)) == expected


class TestMerge:
    """測試 merge 與 extract_subgraph"""

    def setup_method(self):
        self.ethanol = parse_smiles("CCO")

    def test_cleave_and_merge_each_bond(self):
        for bond_index, bond in enumerate(self.ethanol.bonds):
            left = sorted(i for i in range(3) if i <= min(bond.begin, bond.end))
            right = [i for i in range(3) if i not in left]
            a = extract_subgraph(self.ethanol, left, {bond_index: 1})
            b = extract_subgraph(self.ethanol, right, {bond_index: 1})
            assert a.attachment_ids() == (1,)
            assert b.attachment_ids() == (1,)
            assert is_isomorphic(merge(a, b, {1}), self.ethanol)

    def test_empty_shared_ids(self):
        a = parse_smiles("C[*:1]")
        b = parse_smiles("[*:1]O")
        with pytest.raises(NoSharedBondError):
            merge(a, b, set())

    def test_missing_id_on_one_side(self):
        a = parse_smiles("C[*:1]")
        b = parse_smiles("[*:2]O")
        with pytest.raises(NoSharedBondError):
            merge(a, b, {1})

    def test_merge_keeps_other_attachments(self):
        a = parse_smiles("[*:1]CC[*:2]")
        b = parse_smiles("[*:2]N[*:3]")
        merged = merge(a, b, {2})
        assert sorted(merged.attachment_ids()) == [1, 3]
        assert merged.heavy_atom_count == 3

    def test_extract_subgraph_unlabelled(self):
        m = parse_smiles("CC(C)O")
        sub = extract_subgraph(m, [1, 3])
        assert sub.heavy_atom_count == 2
        assert len(sub.attachment_indices) == 2
        assert sub.attachment_ids() == ()


class TestCapping:
    def test_cap_with_hydrogen(self):
        fragment = parse_smiles("[*:1]C(=O)N[*:2]")
        capped = cap_attachments(fragment)
        assert not capped.has_attachments
        assert is_isomorphic(capped, parse_smiles("C(=O)N"))
        assert [a.explicit_h for a in capped.atoms] == [1, 0, 2]

    def test_cap_with_methyl(self):
        fragment = parse_smiles("c1ccc([*:1])cc1")
        capped = cap_attachments(fragment, "C")
        assert is_isomorphic(capped, parse_smiles("Cc1ccccc1"))

    def test_relabel(self):
        fragment = parse_smiles("[*:7]CC[*:9]")
        relabelled = relabel_attachments(fragment, start=1)
        assert relabelled.attachment_ids() == (1, 2)
        assert internal_indices(relabelled) == [1, 2]
