"""測試結果結構與 JSON 輸出"""

import json

from src.core.results import CombinationStatus, FragmentCombination, RetroResult, Solution, StageStats, TerminationReason
from src.engines.fragment_retro import run
from src.fragmenters.rule_based import fragment
from src.matching.matcher import is_isomorphic
from src.molgraph.smiles import parse_smiles
from src.stock.stock import Stock


class TestRetroResult:
    """測試 RetroResult"""

    def setup_method(self):
        self.stock = Stock.from_smiles(["CC(=O)O", "CC(=O)NC", "Nc1ccccc1", "CC(=O)Nc1ccccc1"])
        self.result = run(parse_smiles("CC(=O)Nc1ccccc1"), self.stock)

    def test_to_dict_shape(self):
        payload = self.result.to_dict(self.stock)
        assert is_isomorphic(parse_smiles(payload["target"]), parse_smiles("CC(=O)Nc1ccccc1"))
        assert payload["solved"] is True
        assert payload["termination_reason"] == "reached_target"
        assert payload["n_fragments"] == 2
        assert payload["combinations_evaluated"] == 3
        assert payload["truncated"] is False
        assert [s["size"] for s in payload["solutions"]] == [1, 2]
        json.dumps(payload)

    def test_representative_bb(self):
        payload = self.result.to_dict(self.stock)
        whole = payload["solutions"][0]["blocks"][0]
        assert whole["members"] == [0, 1]
        assert whole["label"] == "A-B"
        assert whole["representative_bb"] == {"id": 3, "smiles": "CC(=O)Nc1ccccc1"}
        without_stock = self.result.to_dict()["solutions"][0]["blocks"][0]
        assert without_stock["representative_bb"] == {"id": 3}

    def test_sample_cap(self):
        acyl = self.result.to_dict(self.stock, sample_size=1)["solutions"][1]["blocks"][0]
        assert acyl["matched_bb_count"] == 3
        assert acyl["matched_bb_ids_sample"] == [0]
        full = self.result.to_dict(self.stock, sample_size=1, full_matches=True)["solutions"][1]["blocks"][0]
        assert full["matched_bb_ids_sample"] == [0, 1, 3]

    def test_timings_optional(self):
        stats = self.result.to_dict(include_timings=False)["stats"]
        assert [s["stage"] for s in stats] == [1, 2]
        assert all("elapsed" not in s for s in stats)
        assert "elapsed" in self.result.to_dict()["stats"][0]

    def test_helpers(self):
        assert self.result.valid_at(1) == [1, 2]
        assert self.result.evaluated_at(2) == [3]
        assert self.result.best_solution() == Solution((3,))
        assert self.result.stage_stats(2).effective_count == 1
        assert self.result.stage_stats(5) is None
        assert self.result.match_calls == sum(s.match_calls for s in self.result.stats)


class TestTypes:
    def test_combination_properties(self):
        d = fragment(parse_smiles("CC(=O)Nc1ccccc1"))
        c = FragmentCombination(3, d.fragments[0], frozenset({1}), CombinationStatus.VALID)
        assert c.stage == 2
        assert c.indices == (0, 1)
        assert c.is_valid

    def test_solution_of_sorts_blocks(self):
        assert Solution.of([4, 1, 2]).blocks == (1, 2, 4)
        assert Solution.of([4, 3]).sort_key == (2, (3, 4))

    def test_empty_result_defaults(self):
        result = RetroResult(decomposition=fragment(parse_smiles("CCO")))
        assert not result.solved
        assert result.termination_reason is TerminationReason.NO_EFFECTIVE
        assert result.combinations_evaluated == 0
        assert result.best_solution() is None

    def test_stage_stats_rounding(self):
        record = StageStats(stage=2, elapsed=0.12345678).to_dict()
        assert record["elapsed"] == 0.123457
