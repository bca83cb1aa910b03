"""測試斷鍵規則表"""

import pytest

from src.fragmenters.rules import (
    DEFAULT_RULES_DIR,
    RULES_DIR_ENV,
    find_cleavage_bonds,
    load_rules,
    parse_environment,
    parse_neighbor,
    parse_rules,
    rules_dir,
)
from src.molgraph.model import BondOrder
from src.molgraph.smiles import parse_smiles
from src.utils.exceptions import RuleTableError

AMIDE_ONLY = "amide\tel=C;arom=0;nbr=O2\tel=N;arom=0\t1\t1\n"
BIARYL_ONLY = "biaryl\tarom=1\tarom=1\t1\t1\n"


class TestParsing:
    """測試規則語言解析"""

    def test_neighbor_with_order_and_nesting(self):
        spec = parse_neighbor("C1(O2)")
        assert spec.element == "C"
        assert spec.order is BondOrder.SINGLE
        assert len(spec.nested) == 1
        assert spec.nested[0].element == "O"
        assert spec.nested[0].order is BondOrder.DOUBLE

    def test_aromatic_neighbor(self):
        spec = parse_neighbor("c:")
        assert spec.element == "C"
        assert spec.aromatic is True
        assert spec.order is BondOrder.AROMATIC

    def test_wildcard_neighbor(self):
        spec = parse_neighbor("*")
        assert spec.element is None
        assert spec.order is None

    def test_environment_fields(self):
        env = parse_environment("el=N;arom=0;sat=1;deg=2-3")
        assert env.elements == ("N",)
        assert env.aromatic is False
        assert env.saturated is True
        assert env.degree == (2, 3)

    def test_bad_environment_key(self):
        with pytest.raises(RuleTableError):
            parse_environment("color=blue")

    def test_wrong_column_count(self):
        with pytest.raises(RuleTableError):
            parse_rules("amide\tel=C\tel=N\t1\n")

    def test_bad_order(self):
        with pytest.raises(RuleTableError):
            parse_rules("amide\tel=C\tel=N\tx\t1\n")

    def test_duplicate_rule_id(self):
        with pytest.raises(RuleTableError):
            parse_rules(AMIDE_ONLY + AMIDE_ONLY)

    def test_comments_and_structural_rules(self):
        table = parse_rules("# header\n" + AMIDE_ONLY + "@chain\tchain\tmin=5;step=2\n")
        assert table.rule_ids == ["amide", "chain"]
        assert table.structural[0].params == {"min": 5, "step": 2}

    def test_unknown_structural_rule(self):
        with pytest.raises(RuleTableError):
            parse_rules("@spiral\tspiral\n")

    def test_builtin_tables_load(self):
        brics = load_rules(DEFAULT_RULES_DIR / "brics_like.rules")
        rbrics = load_rules(DEFAULT_RULES_DIR / "rbrics_like.rules")
        assert len(brics.rules) == 8
        assert [r.rule_id for r in rbrics.rules] == [r.rule_id for r in brics.rules]
        assert {r.kind for r in rbrics.structural} == {"chain", "ring_bridge"}

    def test_missing_file(self, tmp_path):
        with pytest.raises(RuleTableError):
            load_rules(tmp_path / "absent.rules")

    def test_rules_dir_env_override(self, monkeypatch, tmp_path):
        monkeypatch.setenv(RULES_DIR_ENV, str(tmp_path))
        assert rules_dir("/somewhere/else") == tmp_path
        monkeypatch.delenv(RULES_DIR_ENV)
        assert str(rules_dir("/somewhere/else")) == "/somewhere/else"
        assert rules_dir(None) == DEFAULT_RULES_DIR


class TestFindCleavageBonds:
    """測試 find_cleavage_bonds"""

    def test_no_amide_in_ethanol(self):
        assert find_cleavage_bonds(parse_smiles("CCO"), parse_rules(AMIDE_ONLY)) == []

    def test_acetanilide_amide_bond(self):
        m = parse_smiles("CC(=O)Nc1ccccc1")
        hits = find_cleavage_bonds(m, parse_rules(AMIDE_ONLY))
        assert len(hits) == 1
        index, rule_id = hits[0]
        assert rule_id == "amide"
        assert {m.atoms[i].element for i in m.bonds[index].endpoints} == {"C", "N"}
        assert m.bonds[index].endpoints == frozenset({1, 3})

    def test_biphenyl_inter_ring_bond(self):
        m = parse_smiles("c1ccc(-c2ccccc2)cc1")
        hits = find_cleavage_bonds(m, parse_rules(BIARYL_ONLY))
        assert len(hits) == 1
        assert m.bonds[hits[0][0]].endpoints == frozenset({3, 4})

    def test_ring_bonds_skipped_when_acyclic_only(self):
        m = parse_smiles("c1ccccc1")
        assert find_cleavage_bonds(m, parse_rules(BIARYL_ONLY)) == []

    def test_ester_not_taken_by_ether(self):
        table = load_rules(DEFAULT_RULES_DIR / "brics_like.rules")
        m = parse_smiles("CC(=O)OCC")
        hits = dict(find_cleavage_bonds(m, table))
        assert "ester" in hits.values()
        # O-CH2 也是醚鍵，但 O 與羰基碳相連，醚規則排除
        assert "ether" not in hits.values()

    def test_chain_rule(self):
        table = load_rules(DEFAULT_RULES_DIR / "rbrics_like.rules")
        m = parse_smiles("CCCCCCCCC")
        hits = find_cleavage_bonds(m, table)
        assert hits == [(3, "chain"), (7, "chain")]

    def test_short_chain_untouched(self):
        table = load_rules(DEFAULT_RULES_DIR / "rbrics_like.rules")
        assert find_cleavage_bonds(parse_smiles("CCCCCC"), table) == []

    def test_ring_bridge_rule(self):
        table = load_rules(DEFAULT_RULES_DIR / "rbrics_like.rules")
        m = parse_smiles("C1CCCCC1CC1CCCCC1")
        hits = find_cleavage_bonds(m, table)
        assert [rule for _, rule in hits] == ["ring_bridge", "ring_bridge"]
        bridge = 6
        assert all(bridge in m.bonds[i].endpoints for i, _ in hits)
