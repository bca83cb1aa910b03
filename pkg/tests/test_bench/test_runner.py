"""測試效能量測"""

import pytest

from src.bench import runner
from src.bench.generators import oligomer
from src.bench.runner import (
    PARALLEL_COLUMNS,
    SCALING_COLUMNS,
    SCREENING_COLUMNS,
    run_parallel,
    run_scaling,
    run_screening,
)
from src.config.settings import EngineConfig
from src.engines.fragment_retro import FragmentRetroEngine
from src.molgraph.smiles import write_smiles
from src.stock.stock import Stock
from src.utils.exceptions import BenchmarkError


class TestRunners:
    def setup_method(self):
        self.stock = Stock.from_smiles([write_smiles(oligomer(4)), "c1ccsc1", "CCO"])

    def test_scaling(self):
        rows = run_scaling(self.stock, sizes=(2, 3, 4))
        assert [r["fragments"] for r in rows] == [2, 3, 4]
        assert [r["combinations_evaluated"] for r in rows] == [3, 6, 10]
        assert [r["heavy_atoms"] for r in rows] == [12, 18, 24]
        assert all(tuple(r) == SCALING_COLUMNS for r in rows)

    def test_parallel(self):
        rows = run_parallel(self.stock, [oligomer(3)], workers_list=(1, 2))
        assert [r["workers"] for r in rows] == [1, 2]
        assert rows[0]["speedup"] == 1.0
        assert all(tuple(r) == PARALLEL_COLUMNS for r in rows)

    def test_screening(self):
        rows = run_screening(self.stock, [oligomer(3), oligomer(4)])
        assert len(rows) == 2
        for row in rows:
            assert tuple(row) == SCREENING_COLUMNS
            assert row["match_calls_off"] >= row["match_calls_on"]


class TestParallelConsistency:
    def setup_method(self):
        self.stock = Stock.from_smiles([write_smiles(oligomer(4)), "CCO"])

    def test_mismatch_raises(self, monkeypatch):
        outputs = iter([("[1]", 1.0), ("[2]", 0.5)])
        monkeypatch.setattr(runner, "_batch_output", lambda engine, targets, stock: next(outputs))
        with pytest.raises(BenchmarkError):
            run_parallel(self.stock, [oligomer(3)], workers_list=(1, 2))

    def test_batch_output_same_for_workers(self):
        targets = [oligomer(2), oligomer(3)]
        serial, _ = runner._batch_output(FragmentRetroEngine(EngineConfig()), targets, self.stock)
        parallel, _ = runner._batch_output(FragmentRetroEngine(EngineConfig(workers=2)), targets, self.stock)
        assert serial == parallel

    @pytest.mark.slow
    def test_four_worker_counts(self):
        targets = [oligomer(n) for n in (2, 3, 4)]
        rows = run_parallel(self.stock, targets, workers_list=(1, 2, 4, 8))
        assert [r["workers"] for r in rows] == [1, 2, 4, 8]
