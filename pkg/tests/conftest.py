"""共用 fixture：六片段鏈狀目標與玩具庫存"""

import pytest

from src.config.manager import ConfigManager
from src.molgraph.smiles import parse_smiles
from src.stock.stock import Stock

# 苯基-吡啶-嘧啶-噻吩-呋喃-苯基，biaryl 規則切成 A..F 六個片段的路徑
CHAIN_TARGET = "c1ccc(cc1)-c1ccc(cn1)-c1cnc(nc1)-c1ccc(s1)-c1ccc(o1)-c1ccccc1"
CHAIN_STOCK = [
    "c1ccc(cc1)-c1ccc(cn1)-c1cncnc1",  # A-B-C
    "c1ccsc1",  # D
    "c1ccc(o1)-c1ccccc1",  # E-F
]


@pytest.fixture
def chain_target():
    return parse_smiles(CHAIN_TARGET)


@pytest.fixture
def chain_stock():
    return Stock.from_smiles(CHAIN_STOCK)


@pytest.fixture(autouse=True)
def _fresh_config_manager():
    ConfigManager.reset()
    yield
    ConfigManager.reset()
