"""以規則表驅動的片段化器"""

from typing import List, Optional, Tuple

from ..molgraph.model import Molecule
from .base import Fragmenter
from .decomposition import FragmentDecomposition
from .rules import RuleTable, find_cleavage_bonds, load_rules, rules_dir


class RuleTableFragmenter(Fragmenter):
    """讀取規則檔的片段化器

    config 可用 rules_path 指定規則檔；否則從規則目錄讀取
    `<name>.rules`（FRAGRETRO_RULES_DIR > rules_dir 設定 > 內建 rules/）。
    """

    mode = ""

    def _initialize(self):
        path = self.config.get("rules_path")
        if not path:
            path = rules_dir(self.config.get("rules_dir")) / f"{self.mode}.rules"
        self.rules_path = str(path)
        self.table: RuleTable = load_rules(path)

    @property
    def name(self) -> str:
        return self.mode

    def find_cleavage_bonds(self, molecule: Molecule) -> List[Tuple[int, str]]:
        return find_cleavage_bonds(molecule, self.table)


class BricsLikeFragmenter(RuleTableFragmenter):
    """BRICS 風格：8 條非環鍵規則"""

    mode = "brics_like"


class RBricsLikeFragmenter(RuleTableFragmenter):
    """r-BRICS 風格：brics_like 加上長碳鏈與環間橋碳的切斷"""

    mode = "rbrics_like"


def fragment(
    molecule: Molecule,
    mode: str = "brics_like",
    rules_path: Optional[str] = None,
) -> FragmentDecomposition:
    """以指定模式片段化分子

    Args:
        molecule: 不含連接點的分子
        mode: brics_like 或 rbrics_like
        rules_path: 自訂規則檔

    Returns:
        FragmentDecomposition

    Raises:
        FragmenterNotFoundError: 未知的模式
        RuleTableError: 規則檔錯誤
    """
    from ..core.registry import registry

    fragmenter = registry.create_fragmenter(mode, {"rules_path": rules_path})
    return fragmenter.fragment(molecule)
