"""測試工作池"""

import pytest

from src.core import workers as workers_module
from src.core.workers import WorkerPool, match_task
from src.molgraph.smiles import parse_smiles
from src.stock.stock import Stock


def _square(x):
    return x * x


class TestWorkerPool:
    def test_serial_map(self):
        with WorkerPool(1) as pool:
            assert not pool.is_parallel
            assert pool.map(_square, [3, 1, 2]) == [9, 1, 4]

    def test_parallel_map_keeps_order(self):
        with WorkerPool(2) as pool:
            assert pool.is_parallel
            assert pool.map(_square, list(range(50))) == [x * x for x in range(50)]

    def test_empty_items(self):
        with WorkerPool(2) as pool:
            assert pool.map(_square, []) == []

    def test_workers_clamped(self):
        assert WorkerPool(0).workers == 1


class TestMatchTask:
    def setup_method(self):
        self.stock = Stock.from_smiles(["CC(=O)NC", "CCO", "CC(=O)N", "c1ccccc1"])
        self.pattern = parse_smiles("*C(=O)N*")

    def test_match_all(self):
        with WorkerPool(1, self.stock):
            assert match_task((self.pattern, (0, 1, 2, 3), True)) == ((0, 2), 4)

    def test_first_hit(self):
        with WorkerPool(1, self.stock):
            assert match_task((self.pattern, (1, 2, 0), False)) == ((2,), 2)

    def test_same_results_in_processes(self):
        tasks = [(self.pattern, (0, 1), True), (self.pattern, (2, 3), True)]
        with WorkerPool(1, self.stock) as pool:
            serial = pool.map(match_task, tasks)
        with WorkerPool(2, self.stock) as pool:
            assert pool.map(match_task, tasks) == serial

    def test_no_stock_loaded(self):
        with pytest.raises(RuntimeError):
            match_task((self.pattern, (0,), True))


class TestSerialStockScope:
    """序列工作池離開時還原先前載入的庫存"""

    def test_nested_pools_restore_outer(self):
        outer = Stock.from_smiles(["CCO"])
        inner = Stock.from_smiles(["CCN"])
        with WorkerPool(1, outer):
            with WorkerPool(1, inner):
                assert workers_module._STOCK is inner
            assert workers_module._STOCK is outer
        assert workers_module._STOCK is None

    def test_matches_after_inner_exit(self):
        outer = Stock.from_smiles(["CCO", "CCN"])
        inner = Stock.from_smiles(["c1ccccc1"])
        with WorkerPool(1, outer) as pool:
            with WorkerPool(1, inner):
                pass
            assert pool.map(match_task, [(parse_smiles("*CN"), (0, 1), True)]) == [((1,), 2)]
