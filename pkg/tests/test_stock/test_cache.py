"""測試庫存快取檔"""

import random

import pytest

from src.bench.generators import random_stock, random_targets
from src.stock.cache import CACHE_VERSION, HEADER, decode_stock, encode_stock, load_cache, save_cache
from src.stock.stock import Stock, build_stock
from src.utils.exceptions import CacheVersionMismatchError, CorruptCacheError, StockIOError


class TestCacheRoundTrip:
    """測試 save_cache / load_cache"""

    def setup_method(self):
        self.stock = Stock.from_smiles(["CCO", "c1ccccc1", "CC(=O)Nc1ccccc1"])

    def test_round_trip(self, tmp_path):
        path = tmp_path / "stock.frsk"
        save_cache(self.stock, path)
        loaded = load_cache(path)
        assert loaded == self.stock
        assert [e.smiles for e in loaded] == [e.smiles for e in self.stock]
        assert (loaded.fp_matrix == self.stock.fp_matrix).all()

    def test_bit_exact(self, tmp_path):
        path = tmp_path / "stock.frsk"
        save_cache(self.stock, path)
        assert encode_stock(load_cache(path)) == path.read_bytes()

    def test_random_stocks(self):
        rng = random.Random(12)
        targets = random_targets(rng, 3)
        for nbits, path_max in ((2048, 7), (512, 3)):
            stock = Stock.from_smiles(random_stock(rng, targets, 40), nbits, path_max)
            assert decode_stock(encode_stock(stock)) == stock

    def test_built_stock_digest_checked(self, tmp_path):
        source = tmp_path / "bb.smi"
        source.write_text("CCO\nCCN\n", encoding="utf-8")
        stock = build_stock(source)
        path = tmp_path / "bb.frsk"
        save_cache(stock, path)
        assert load_cache(path, source_digest=stock.source_digest) == stock
        with pytest.raises(CacheVersionMismatchError):
            load_cache(path, source_digest=b"\x01" * 32)

    def test_empty_stock(self):
        empty = Stock([])
        assert decode_stock(encode_stock(empty)) == empty


class TestCacheErrors:
    def setup_method(self):
        self.data = encode_stock(Stock.from_smiles(["CCO", "CCN"]))

    def test_fp_params_mismatch(self):
        with pytest.raises(CacheVersionMismatchError):
            decode_stock(self.data, nbits=1024)
        with pytest.raises(CacheVersionMismatchError):
            decode_stock(self.data, path_max=5)

    def test_version_mismatch(self):
        header = HEADER.unpack_from(self.data, 0)
        patched = HEADER.pack(header[0], CACHE_VERSION + 1, *header[2:]) + self.data[HEADER.size :]
        with pytest.raises(CacheVersionMismatchError):
            decode_stock(patched)

    def test_truncated(self):
        with pytest.raises(CorruptCacheError):
            decode_stock(self.data[:-20])

    def test_too_short(self):
        with pytest.raises(CorruptCacheError):
            decode_stock(self.data[:10])

    def test_bad_magic(self):
        with pytest.raises(CorruptCacheError):
            decode_stock(b"XXXX" + self.data[4:])

    def test_flipped_byte(self):
        corrupted = bytearray(self.data)
        corrupted[HEADER.size + 5] ^= 0xFF
        with pytest.raises(CorruptCacheError):
            decode_stock(bytes(corrupted))

    def test_missing_file(self, tmp_path):
        with pytest.raises(StockIOError):
            load_cache(tmp_path / "absent.frsk")
