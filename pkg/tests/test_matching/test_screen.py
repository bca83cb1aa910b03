"""測試指紋與候選篩選"""

import random

import numpy as np
import pytest

from src.bench.generators import assemble, mutate_pattern, random_subpattern
from src.matching.screen import (
    PatternFingerprint,
    QueryProfile,
    check_params,
    fingerprint,
    path_features,
    screen_candidates,
)
from src.molgraph.smiles import parse_smiles
from src.oracle.naive import naive_match
from src.stock.stock import Stock
from src.utils.exceptions import ConfigurationError


class TestFingerprint:
    """測試 fingerprint"""

    def test_width(self):
        fp = fingerprint(parse_smiles("CCO"), nbits=1024, path_max=5)
        assert fp.bits.dtype == np.uint64
        assert fp.bits.size == 16
        assert 0 < fp.popcount <= 1024

    def test_single_atom_subset(self):
        carbon = fingerprint(parse_smiles("C"))
        for smiles in ("CC", "c1ccccc1C", "CC(=O)NC", "C1CCCCC1"):
            # 芳香碳標籤不同，只有含非芳香碳者才包含
            assert fingerprint(parse_smiles(smiles)).contains(carbon)

    def test_amide_query_subset(self):
        query = fingerprint(parse_smiles("*C(=O)N*"))
        target = fingerprint(parse_smiles("CC(=O)NC"))
        assert target.contains(query)

    def test_attachments_excluded_from_paths(self):
        features = path_features(parse_smiles("*C(=O)N*"))
        assert all("*" not in f for f in features)
        assert "P:C|2|O" in features

    def test_ring_features_only_for_own_rings(self):
        chain = path_features(parse_smiles("*CCCC*"))
        ring = path_features(parse_smiles("C1CCCCC1"))
        assert not any(f.startswith("R") for f in chain)
        assert "R:C" in ring and "RB:C|1|C" in ring

    def test_round_trip_bytes(self):
        fp = fingerprint(parse_smiles("c1ccncc1"), nbits=512, path_max=4)
        again = PatternFingerprint.from_bytes(fp.to_bytes(), 512, 4)
        assert again == fp

    def test_from_bytes_wrong_length(self):
        with pytest.raises(ValueError):
            PatternFingerprint.from_bytes(b"\x00" * 8, 128, 7)

    def test_bad_params(self):
        with pytest.raises(ConfigurationError):
            check_params(100, 7)
        with pytest.raises(ConfigurationError):
            check_params(128, -1)

    def test_query_profile(self):
        profile = QueryProfile.of(parse_smiles("*c1ccccc1"), 2048, 7)
        assert (profile.heavy_atoms, profile.rings) == (6, 1)


class TestScreenCandidates:
    """測試 screen_candidates"""

    def setup_method(self):
        self.stock = Stock.from_smiles(["CCCC", "CC(=O)NCC", "c1ccccc1", "CC(=O)Nc1ccccc1", "C1CCCCC1"])

    def test_heavy_atom_screen(self):
        fragment = parse_smiles("CCCCC")
        assert 0 not in screen_candidates(fragment, self.stock)

    def test_ring_screen(self):
        fragment = parse_smiles("*c1ccccc1")
        kept = screen_candidates(fragment, self.stock)
        assert 0 not in kept and 1 not in kept
        assert {2, 3} <= kept

    def test_entry_itself_kept(self):
        for entry in self.stock:
            assert entry.id in screen_candidates(entry.molecule, self.stock)

    def test_prior_restricts(self):
        fragment = parse_smiles("*C(=O)N*")
        assert screen_candidates(fragment, self.stock, prior={1}) == frozenset({1})
        assert screen_candidates(fragment, self.stock, prior=set()) == frozenset()


def _matched_pairs(rng: random.Random, count: int):
    for _ in range(count):
        target = assemble(rng, rng.randint(1, 4))
        query = random_subpattern(rng, target, rng.randint(1, 12))
        if rng.random() < 0.3:
            query = mutate_pattern(rng, query)
        if naive_match(query, target):
            yield query, target


class TestNoFalseNegatives:
    """參考實作判定匹配的配對一定通過篩選"""

    def _check(self, seed: int, count: int):
        rng = random.Random(seed)
        for query, target in _matched_pairs(rng, count):
            profile = QueryProfile.of(query, 2048, 7)
            assert fingerprint(target).contains(profile.fp)
            assert target.heavy_atom_count >= profile.heavy_atoms
            assert target.ring_count >= profile.rings

    def test_reduced(self):
        self._check(seed=8, count=400)

    @pytest.mark.slow
    def test_full(self):
        self._check(seed=9, count=10000)

    def test_through_stock(self):
        rng = random.Random(4)
        targets = [assemble(rng, rng.randint(1, 4)) for _ in range(20)]
        from src.molgraph.smiles import write_smiles

        stock = Stock.from_smiles([write_smiles(t) for t in targets])
        for t in targets:
            query = random_subpattern(rng, t, 6)
            truth = {e.id for e in stock if naive_match(query, e.molecule)}
            assert truth <= screen_candidates(query, stock)
