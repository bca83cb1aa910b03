"""斷鍵規則表：原子環境小語言、規則檔載入、結構規則

規則檔每行一條規則，欄位以 TAB 分隔：

    rule_id <TAB> left_env <TAB> right_env <TAB> order <TAB> acyclic_only

環境以分號分隔的 key=value 描述：

    el=C,N        元素（'*' 表示任意）
    arom=0|1      芳香性
    ring=0|1      是否為環原子
    deg=2 | 2-3   重原子度數（含鍵的另一端）
    sat=0|1       是否只有單鍵
    nbr=O2,O2     必須存在的鄰居（各自不同，不含鍵的另一端）
    nonbr=C1(O2)  不可存在的鄰居

鄰居語法為 元素[鍵級][(巢狀鄰居,...)]，小寫元素表示芳香原子，'*' 表示任意元素；
鍵級為 1/2/3/:（芳香），省略表示任意；order 欄位則用 1/2/3/a。

以 '@' 開頭的行是結構規則：

    @chain <TAB> rule_id <TAB> min=7;step=4
    @ring_bridge <TAB> rule_id

結構規則只作用在規則表沒有命中的鍵上。
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
from loguru import logger

from ..molgraph.model import BondOrder, Molecule
from ..utils.exceptions import RuleTableError

RULES_DIR_ENV = "FRAGRETRO_RULES_DIR"
DEFAULT_RULES_DIR = Path(__file__).resolve().parents[2] / "rules"


@dataclass(frozen=True)
class NeighborSpec:
    """鄰居條件：元素、芳香性、鍵級與巢狀鄰居"""

    element: Optional[str] = None
    aromatic: Optional[bool] = None
    order: Optional[BondOrder] = None
    nested: Tuple["NeighborSpec", ...] = ()

    def matches(self, molecule: Molecule, index: int, order: BondOrder, came_from: int) -> bool:
        atom = molecule.atoms[index]
        if atom.is_attachment:
            return False
        if self.element is not None and atom.element != self.element:
            return False
        if self.aromatic is not None and atom.aromatic != self.aromatic:
            return False
        if self.order is not None and order != self.order:
            return False
        if not self.nested:
            return True
        return _assign(molecule, index, self.nested, exclude=came_from)


def _assign(molecule: Molecule, index: int, specs: Sequence[NeighborSpec], exclude: int) -> bool:
    """每個條件各配一個不同的鄰居（回溯）"""
    options = [(nbr, order) for nbr, order in molecule.neighbors(index) if nbr != exclude]
    used = set()

    def place(k: int) -> bool:
        if k == len(specs):
            return True
        for nbr, order in options:
            if nbr in used or not specs[k].matches(molecule, nbr, order, index):
                continue
            used.add(nbr)
            if place(k + 1):
                return True
            used.discard(nbr)
        return False

    return place(0)


@dataclass(frozen=True)
class AtomEnvironment:
    """鍵端原子的環境條件；None 表示不限制"""

    elements: Optional[Tuple[str, ...]] = None
    aromatic: Optional[bool] = None
    in_ring: Optional[bool] = None
    degree: Optional[Tuple[int, int]] = None
    saturated: Optional[bool] = None
    required: Tuple[NeighborSpec, ...] = ()
    forbidden: Tuple[NeighborSpec, ...] = ()

    def matches(self, molecule: Molecule, index: int, partner: int) -> bool:
        atom = molecule.atoms[index]
        if atom.is_attachment:
            return False
        if self.elements is not None and atom.element not in self.elements:
            return False
        if self.aromatic is not None and atom.aromatic != self.aromatic:
            return False
        if self.in_ring is not None and molecule.ring_atom_flags[index] != self.in_ring:
            return False
        if self.degree is not None:
            low, high = self.degree
            if not low <= molecule.heavy_degree(index) <= high:
                return False
        if self.saturated is not None:
            only_single = all(order is BondOrder.SINGLE for _, order in molecule.neighbors(index))
            if only_single != self.saturated:
                return False
        if self.required and not _assign(molecule, index, self.required, exclude=partner):
            return False
        for spec in self.forbidden:
            for nbr, order in molecule.neighbors(index):
                if nbr != partner and spec.matches(molecule, nbr, order, index):
                    return False
        return True


@dataclass(frozen=True)
class CleavageRule:
    rule_id: str
    left_env: AtomEnvironment
    right_env: AtomEnvironment
    bond_order: BondOrder = BondOrder.SINGLE
    acyclic_only: bool = True

    def applies(self, molecule: Molecule, bond_index: int) -> bool:
        bond = molecule.bonds[bond_index]
        if bond.order != self.bond_order:
            return False
        if self.acyclic_only and molecule.is_ring_bond(bond_index):
            return False
        a, b = bond.begin, bond.end
        if self.left_env.matches(molecule, a, b) and self.right_env.matches(molecule, b, a):
            return True
        return self.left_env.matches(molecule, b, a) and self.right_env.matches(molecule, a, b)


def _is_chain_carbon(molecule: Molecule, index: int) -> bool:
    atom = molecule.atoms[index]
    return (
        atom.element == "C"
        and not atom.aromatic
        and not atom.is_attachment
        and not molecule.ring_atom_flags[index]
        and all(order is BondOrder.SINGLE for _, order in molecule.neighbors(index))
    )


@dataclass(frozen=True)
class StructuralRule:
    """以圖結構而非原子環境判斷的規則"""

    rule_id: str
    params: Dict[str, int] = field(default_factory=dict)

    kind = ""

    def bonds(self, molecule: Molecule) -> List[int]:
        raise NotImplementedError


@dataclass(frozen=True)
class ChainRule(StructuralRule):
    """長碳鏈：長度 ≥ min 的非環 sp3 碳直鏈，每 step 個碳切一刀

    直鏈從原子索引較小的一端開始編號，切在 (step-1, step)、(2step-1, 2step)…之間。
    有分支的碳鏈不處理。
    """

    kind = "chain"

    def bonds(self, molecule: Molecule) -> List[int]:
        minimum = self.params.get("min", 7)
        step = self.params.get("step", 4)
        graph = nx.Graph()
        carbons = [i for i in range(len(molecule.atoms)) if _is_chain_carbon(molecule, i)]
        graph.add_nodes_from(carbons)
        for i in carbons:
            for nbr, _ in molecule.neighbors(i):
                if nbr in graph and nbr > i:
                    graph.add_edge(i, nbr)

        found: List[int] = []
        for component in nx.connected_components(graph):
            if len(component) < minimum:
                continue
            if any(graph.degree(i) > 2 for i in component):
                continue
            ends = sorted(i for i in component if graph.degree(i) <= 1)
            if not ends:
                continue
            run = [ends[0]]
            while len(run) < len(component):
                run.append(next(n for n in graph.neighbors(run[-1]) if n not in run[-2:]))
            for position in range(step - 1, len(run) - 1, step):
                found.append(molecule.bond_index(run[position], run[position + 1]))
        return sorted(found)


@dataclass(frozen=True)
class RingBridgeRule(StructuralRule):
    """連接兩個以上環原子的非環 sp3 碳：切開它與環原子之間的鍵"""

    kind = "ring_bridge"

    def bonds(self, molecule: Molecule) -> List[int]:
        found: List[int] = []
        for i in range(len(molecule.atoms)):
            if not _is_chain_carbon(molecule, i):
                continue
            ring_nbrs = [nbr for nbr, _ in molecule.neighbors(i) if molecule.ring_atom_flags[nbr]]
            if len(ring_nbrs) >= 2:
                found.extend(molecule.bond_index(i, nbr) for nbr in ring_nbrs)
        return sorted(found)


STRUCTURAL_RULES = {cls.kind: cls for cls in (ChainRule, RingBridgeRule)}


@dataclass(frozen=True)
class RuleTable:
    rules: Tuple[CleavageRule, ...] = ()
    structural: Tuple[StructuralRule, ...] = ()
    source: Optional[str] = None

    def __len__(self) -> int:
        return len(self.rules) + len(self.structural)

    @property
    def rule_ids(self) -> List[str]:
        return [r.rule_id for r in self.rules] + [r.rule_id for r in self.structural]


def _split_top_level(text: str) -> List[str]:
    """以逗號切分，忽略括號內的逗號"""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise RuleTableError(f"括號不平衡: {text}")
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise RuleTableError(f"括號不平衡: {text}")
    parts.append("".join(current))
    return [p.strip() for p in parts if p.strip()]


def parse_neighbor(token: str) -> NeighborSpec:
    """解析鄰居條件，例如 'O2'、'C1(O2)'、'c'、'*:'"""
    nested: Tuple[NeighborSpec, ...] = ()
    head = token
    if "(" in token:
        if not token.endswith(")"):
            raise RuleTableError(f"無效的鄰居條件: {token}")
        head, inner = token.split("(", 1)
        nested = tuple(parse_neighbor(t) for t in _split_top_level(inner[:-1]))

    order: Optional[BondOrder] = None
    if head and head[-1] in "123:":
        order = BondOrder.from_code(head[-1])
        head = head[:-1]

    if head == "*":
        return NeighborSpec(order=order, nested=nested)
    if not head or not head.isalpha():
        raise RuleTableError(f"無效的鄰居元素: {token}")
    if head[0].islower():
        return NeighborSpec(element=head.capitalize(), aromatic=True, order=order, nested=nested)
    return NeighborSpec(element=head, order=order, nested=nested)


def _parse_flag(key: str, value: str) -> bool:
    if value not in ("0", "1"):
        raise RuleTableError(f"{key} 必須是 0 或 1: {value}")
    return value == "1"


def parse_environment(text: str) -> AtomEnvironment:
    """解析原子環境；'*' 或空字串表示任意原子"""
    text = text.strip()
    if text in ("", "*"):
        return AtomEnvironment()
    fields: Dict[str, object] = {}
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise RuleTableError(f"環境欄位缺少 '=': {item}")
        key, value = (s.strip() for s in item.split("=", 1))
        if key == "el":
            fields["elements"] = None if value == "*" else tuple(v.strip() for v in value.split(","))
        elif key in ("arom", "ring", "sat"):
            name = {"arom": "aromatic", "ring": "in_ring", "sat": "saturated"}[key]
            fields[name] = _parse_flag(key, value)
        elif key == "deg":
            try:
                if "-" in value:
                    low, high = (int(v) for v in value.split("-", 1))
                else:
                    low = high = int(value)
            except ValueError:
                raise RuleTableError(f"無效的度數範圍: {value}")
            if low > high or low < 0:
                raise RuleTableError(f"無效的度數範圍: {value}")
            fields["degree"] = (low, high)
        elif key == "nbr":
            fields["required"] = tuple(parse_neighbor(t) for t in _split_top_level(value))
        elif key == "nonbr":
            fields["forbidden"] = tuple(parse_neighbor(t) for t in _split_top_level(value))
        else:
            raise RuleTableError(f"未知的環境欄位: {key}")
    return AtomEnvironment(**fields)


def _parse_params(text: str) -> Dict[str, int]:
    params: Dict[str, int] = {}
    for item in text.split(";"):
        item = item.strip()
        if not item or item == "-":
            continue
        key, _, value = item.partition("=")
        try:
            params[key.strip()] = int(value)
        except ValueError:
            raise RuleTableError(f"無效的結構規則參數: {item}")
    return params


def parse_rules(text: str, source: Optional[str] = None) -> RuleTable:
    """解析規則表文字

    Raises:
        RuleTableError: 欄位數錯誤、環境語法錯誤或 rule_id 重複
    """
    rules: List[CleavageRule] = []
    structural: List[StructuralRule] = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        columns = [c.strip() for c in line.split("\t")]
        where = f"{source or '<rules>'}:{lineno}"

        if columns[0].startswith("@"):
            kind = columns[0][1:]
            if kind not in STRUCTURAL_RULES or len(columns) < 2:
                raise RuleTableError(f"{where} 無效的結構規則: {columns[0]}")
            rule_id = columns[1]
            params = _parse_params(columns[2]) if len(columns) > 2 else {}
            rule: Union[CleavageRule, StructuralRule] = STRUCTURAL_RULES[kind](rule_id, params)
            structural.append(rule)
        else:
            if len(columns) != 5:
                raise RuleTableError(f"{where} 應有 5 個欄位，實際 {len(columns)} 個")
            rule_id, left, right, order, acyclic = columns
            try:
                bond_order = BondOrder.from_code(order)
                rule = CleavageRule(
                    rule_id=rule_id,
                    left_env=parse_environment(left),
                    right_env=parse_environment(right),
                    bond_order=bond_order,
                    acyclic_only=_parse_flag("acyclic_only", acyclic),
                )
            except ValueError:
                raise RuleTableError(f"{where} 無效的鍵級: {order}")
            except RuleTableError as e:
                raise RuleTableError(f"{where} {e}")
            rules.append(rule)

        if rule_id in seen:
            raise RuleTableError(f"{where} rule_id 重複: {rule_id}")
        seen.add(rule_id)

    return RuleTable(tuple(rules), tuple(structural), source)


def rules_dir(configured: Optional[str] = None) -> Path:
    """規則目錄：環境變數 > 設定值 > 內建 rules/"""
    override = os.environ.get(RULES_DIR_ENV)
    if override:
        return Path(override)
    if configured:
        return Path(configured)
    return DEFAULT_RULES_DIR


def load_rules(path: Union[str, Path]) -> RuleTable:
    """讀取規則檔

    Raises:
        RuleTableError: 檔案不存在或格式錯誤
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise RuleTableError(f"無法讀取規則檔 {path}: {str(e)}")
    table = parse_rules(text, source=str(path))
    logger.debug(f"載入規則表 {path.name}: {len(table)} 條規則")
    return table


def find_cleavage_bonds(
    molecule: Molecule,
    rules: Union[RuleTable, Sequence[CleavageRule]],
) -> List[Tuple[int, str]]:
    """找出可斷的鍵

    每條鍵依規則表順序取第一條命中的規則；結構規則只看尚未命中的鍵。

    Args:
        molecule: 不含連接點的分子
        rules: 規則表或 CleavageRule 列表

    Returns:
        依鍵索引排序的 (bond_index, rule_id)
    """
    table = rules if isinstance(rules, RuleTable) else RuleTable(tuple(rules))
    hits: Dict[int, str] = {}
    for index in range(len(molecule.bonds)):
        for rule in table.rules:
            if rule.applies(molecule, index):
                hits[index] = rule.rule_id
                break
    for rule in table.structural:
        for index in rule.bonds(molecule):
            if index not in hits:
                hits[index] = rule.rule_id
    return sorted(hits.items())
