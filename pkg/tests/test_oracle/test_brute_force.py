"""測試暴力參考引擎，並與分階段搜尋比對"""

import random

import pytest

from src.bench.generators import random_stock, random_target
from src.config.settings import EngineConfig
from src.core.results import TerminationReason
from src.engines.fragment_retro import run
from src.molgraph.smiles import parse_smiles
from src.oracle.brute_force import MAX_FRAGMENTS, brute_force_retro
from src.stock.stock import Stock
from src.utils.exceptions import TooManyFragmentsError


class TestBruteForce:
    """測試 brute_force_retro"""

    def test_chain_target(self, chain_target, chain_stock):
        oracle = brute_force_retro(chain_target, chain_stock)
        assert oracle.solved
        assert len(oracle.solutions) == 8
        assert oracle.termination_reason is TerminationReason.REACHED_TARGET
        # 窮舉所有 21 個連通子集
        assert oracle.combinations_evaluated == 21

    def test_matches_engine_on_chain(self, chain_target, chain_stock):
        assert brute_force_retro(chain_target, chain_stock).signature() == run(chain_target, chain_stock).signature()

    def test_empty_stock(self, chain_target):
        oracle = brute_force_retro(chain_target, Stock([]))
        assert not oracle.solved
        assert oracle.termination_reason is TerminationReason.INIT_FAIL

    def test_single_fragment(self):
        oracle = brute_force_retro(parse_smiles("CCO"), Stock.from_smiles(["CCO"]))
        assert oracle.solved
        assert oracle.combinations_evaluated == 1

    def test_fragment_limit(self):
        smiles = "c1ccc(cc1)" + "-c1ccc(cc1)" * (MAX_FRAGMENTS - 1) + "-c1ccccc1"
        with pytest.raises(TooManyFragmentsError):
            brute_force_retro(parse_smiles(smiles), Stock.from_smiles(["c1ccccc1"]))

    def test_cap_keeps_smallest(self, chain_target, chain_stock):
        oracle = brute_force_retro(chain_target, chain_stock, config=EngineConfig(max_solutions=2))
        assert oracle.truncated
        assert oracle.termination_reason is TerminationReason.SOLUTION_CAP
        assert [s.size for s in oracle.solutions] == [3, 4]


def _compare(seed: int, count: int, max_fragments: int, stock_size: int, min_fragments: int = 1):
    rng = random.Random(seed)
    for _ in range(count):
        target = random_target(rng, min_fragments=min_fragments, max_fragments=max_fragments)
        stock = Stock.from_smiles(random_stock(rng, [target], stock_size))
        expected = brute_force_retro(target, stock)
        actual = run(target, stock)
        assert actual.signature() == expected.signature()


class TestEquivalence:
    """分階段搜尋與窮舉在 solved、有效組合與解上一致"""

    def test_reduced(self):
        _compare(seed=31, count=12, max_fragments=5, stock_size=25)

    @pytest.mark.slow
    def test_full(self):
        _compare(seed=32, count=60, max_fragments=8, stock_size=60, min_fragments=2)
