"""搜尋結果資料型別"""

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Dict, FrozenSet, List, Optional, Tuple

from ..molgraph.model import Molecule
from ..molgraph.smiles import write_smiles
from ..utils import bitset

if TYPE_CHECKING:
    from ..fragmenters.decomposition import FragmentDecomposition
    from ..stock.stock import Stock


class CombinationStatus(str, Enum):
    VALID = "valid"
    INVALID = "invalid"
    UNEVALUATED = "unevaluated"


class TerminationReason(str, Enum):
    INIT_FAIL = "init_fail"
    NO_EFFECTIVE = "no_effective"
    REACHED_TARGET = "reached_target"
    STAGE_LIMIT = "stage_limit"
    SOLUTION_CAP = "solution_cap"


@dataclass
class FragmentCombination:
    """片段組合：成員位元集合、合併後的 pattern 與命中的建構塊"""

    members: int
    pattern: Molecule
    matched_bbs: FrozenSet[int] = frozenset()
    status: CombinationStatus = CombinationStatus.UNEVALUATED

    @property
    def stage(self) -> int:
        return bitset.popcount(self.members)

    @property
    def indices(self) -> Tuple[int, ...]:
        return bitset.to_indices(self.members)

    @property
    def is_valid(self) -> bool:
        return self.status is CombinationStatus.VALID


@dataclass(frozen=True)
class Solution:
    """F₁ 的一個分割；blocks 為遞增排列的成員位元集合"""

    blocks: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.blocks)

    @property
    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return self.size, tuple(sorted(self.blocks))

    @classmethod
    def of(cls, blocks) -> "Solution":
        return cls(tuple(sorted(blocks)))


@dataclass
class StageStats:
    stage: int
    effective_count: int = 0
    valid_count: int = 0
    pruned: int = 0
    candidates: int = 0
    screen_rejects: int = 0
    match_calls: int = 0
    elapsed: float = 0.0

    def to_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        record = {
            "stage": self.stage,
            "effective_count": self.effective_count,
            "valid_count": self.valid_count,
            "pruned": self.pruned,
            "candidates": self.candidates,
            "screen_rejects": self.screen_rejects,
            "match_calls": self.match_calls,
        }
        if include_timings:
            record["elapsed"] = round(self.elapsed, 6)
        return record


@dataclass
class RetroResult:
    """一次逆合成搜尋的結果

    Attributes:
        decomposition: 目標的片段分解
        solved: 是否至少有一個解
        solutions: 依 (大小, 區塊位元集合) 排序的解
        valid_combinations: 成員位元集合 → 有效組合
        evaluated: 所有評估過的組合（含無效者）
        stats: 每個階段的統計
        termination_reason: 結束原因
        truncated: 解的數量達到上限而被截斷
    """

    decomposition: "FragmentDecomposition"
    solved: bool = False
    solutions: List[Solution] = field(default_factory=list)
    valid_combinations: Dict[int, FragmentCombination] = field(default_factory=dict)
    evaluated: Dict[int, FragmentCombination] = field(default_factory=dict)
    stats: List[StageStats] = field(default_factory=list)
    termination_reason: TerminationReason = TerminationReason.NO_EFFECTIVE
    truncated: bool = False

    @property
    def combinations_evaluated(self) -> int:
        return sum(s.effective_count for s in self.stats)

    @property
    def match_calls(self) -> int:
        return sum(s.match_calls for s in self.stats)

    @property
    def elapsed(self) -> float:
        return sum(s.elapsed for s in self.stats)

    def stage_stats(self, stage: int) -> Optional[StageStats]:
        return next((s for s in self.stats if s.stage == stage), None)

    def valid_at(self, stage: int) -> List[int]:
        return sorted(m for m, c in self.valid_combinations.items() if c.stage == stage)

    def evaluated_at(self, stage: int) -> List[int]:
        return sorted(m for m, c in self.evaluated.items() if c.stage == stage)

    def best_solution(self) -> Optional[Solution]:
        return self.solutions[0] if self.solutions else None

    def signature(self) -> Tuple[bool, Dict[int, FrozenSet[int]], Tuple[Solution, ...]]:
        """比較用：(solved, 有效組合 → 命中集合, 解)"""
        valid = {m: c.matched_bbs for m, c in sorted(self.valid_combinations.items())}
        return self.solved, valid, tuple(self.solutions)

    def to_dict(
        self,
        stock: Optional["Stock"] = None,
        sample_size: int = 20,
        full_matches: bool = False,
        include_timings: bool = True,
    ) -> Dict[str, Any]:
        """轉成穩定排序的 JSON 結構"""
        d = self.decomposition
        solutions = []
        for solution in self.solutions:
            blocks = []
            for members in solution.blocks:
                combination = self.valid_combinations[members]
                matched = sorted(combination.matched_bbs)
                block: Dict[str, Any] = {
                    "members": list(bitset.to_indices(members)),
                    "label": d.label(members),
                    "pattern_smiles": write_smiles(combination.pattern),
                    "matched_bb_count": len(matched),
                    "matched_bb_ids_sample": matched if full_matches else matched[:sample_size],
                }
                if matched:
                    representative: Dict[str, Any] = {"id": matched[0]}
                    if stock is not None:
                        representative["smiles"] = stock[matched[0]].smiles
                    block["representative_bb"] = representative
                blocks.append(block)
            solutions.append({"size": solution.size, "blocks": blocks})

        return {
            "target": write_smiles(d.target),
            "solved": self.solved,
            "termination_reason": self.termination_reason.value,
            "n_fragments": d.k,
            "fragments": [write_smiles(f, label_attachments=True) for f in d.fragments],
            "combinations_evaluated": self.combinations_evaluated,
            "truncated": self.truncated,
            "solutions": solutions,
            "stats": [s.to_dict(include_timings) for s in self.stats],
        }
