"""SMILES 讀寫

支援有機子集、方括號原子（電荷、氫數）、小寫芳香原子、環閉合數字與 %nn、
萬用原子 '*' 及 '[*:n]'。立體標記（/ \\ @）會被解析後捨棄；同位素與原子類別忽略。
"""

import re
from typing import Dict, List, Optional, Sequence, Tuple

from .model import WILDCARD, Atom, Bond, BondOrder, Molecule
from ..utils.exceptions import MultiComponentError, SmilesSyntaxError, ValenceError

ORGANIC_SUBSET = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"}
AROMATIC_ORGANIC = {"b", "c", "n", "o", "p", "s"}
AROMATIC_BRACKET = AROMATIC_ORGANIC | {"se", "as", "te"}

DEFAULT_VALENCES: Dict[str, Tuple[int, ...]] = {
    "B": (3,),
    "C": (4,),
    "N": (3, 5),
    "O": (2,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "F": (1,),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
}

ELEMENTS = frozenset(
    """H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni Cu Zn
    Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe Cs Ba La Ce
    Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt Au Hg Tl Pb Bi Po At Rn
    Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr""".split()
)

_TOKEN_RE = re.compile(
    r"(?P<bracket>\[[^\[\]]*\])"
    r"|(?P<organic>Cl|Br|B|C|N|O|P|S|F|I|b|c|n|o|p|s|\*)"
    r"|(?P<bond>[-=#:/\\])"
    r"|(?P<ring>%\d\d|\d)"
    r"|(?P<open>\()"
    r"|(?P<close>\))"
    r"|(?P<dot>\.)"
)

_BRACKET_RE = re.compile(
    r"^\[(?P<isotope>\d+)?"
    r"(?P<symbol>\*|se|as|te|[A-Z][a-z]?|[bcnops])"
    r"(?P<chiral>@@?(?:TH[12]|AL[12]|SP[123]|TB\d{1,2}|OH\d{1,2})?)?"
    r"(?P<hcount>H\d*)?"
    r"(?P<charge>[+-]\d*|\+\++|--+)?"
    r"(?::(?P<label>\d+))?\]$"
)

_BOND_SYMBOLS = {
    "-": BondOrder.SINGLE,
    "/": BondOrder.SINGLE,
    "\\": BondOrder.SINGLE,
    "=": BondOrder.DOUBLE,
    "#": BondOrder.TRIPLE,
    ":": BondOrder.AROMATIC,
}


def implicit_hydrogens(element: str, aromatic: bool, orders: Sequence[BondOrder]) -> int:
    """依有機子集預設價數補足隱含氫數

    芳香原子：每個芳香鍵計 1，若加上 π 鍵仍不超過最低預設價數則再加 1
    （吡咯型 n、呋喃 o、噻吩 s 以孤對電子參與，不加）。

    Raises:
        ValenceError: 鍵級總和超過所有預設價數
    """
    valences = DEFAULT_VALENCES[element]
    if aromatic:
        used = sum(1 if order is BondOrder.AROMATIC else order.value for order in orders)
        if any(order is BondOrder.AROMATIC for order in orders) and used + 1 <= valences[0]:
            used += 1
    else:
        used = sum(1 if order is BondOrder.AROMATIC else order.value for order in orders)
    for valence in valences:
        if valence >= used:
            return valence - used
    raise ValenceError(f"{element} 的鍵級總和 {used} 超過允許價數 {max(valences)}")


class _Builder:
    """解析過程中的可變狀態"""

    def __init__(self):
        self.atoms: List[dict] = []
        self.bonds: List[Tuple[int, int, Optional[str]]] = []
        self.pairs = set()

    def add_atom(self, **fields) -> int:
        self.atoms.append(fields)
        return len(self.atoms) - 1

    def add_bond(self, a: int, b: int, symbol: Optional[str], text: str):
        key = (a, b) if a < b else (b, a)
        if a == b or key in self.pairs:
            raise SmilesSyntaxError(f"重複或自身的鍵: {text!r}")
        self.pairs.add(key)
        self.bonds.append((a, b, symbol))


def _parse_charge(text: Optional[str]) -> int:
    if not text:
        return 0
    sign = 1 if text[0] == "+" else -1
    rest = text[1:]
    if not rest:
        return sign
    if rest.isdigit():
        return sign * int(rest)
    return sign * len(text)


def _parse_bracket(token: str, builder: _Builder) -> int:
    match = _BRACKET_RE.match(token)
    if not match:
        raise SmilesSyntaxError(f"無法解析的方括號原子: {token}")
    symbol = match.group("symbol")
    charge = _parse_charge(match.group("charge"))
    if not -4 <= charge <= 4:
        raise SmilesSyntaxError(f"形式電荷超出範圍: {token}")
    hcount_text = match.group("hcount")
    hcount = 0
    if hcount_text:
        hcount = int(hcount_text[1:]) if len(hcount_text) > 1 else 1

    if symbol == WILDCARD:
        label = match.group("label")
        return builder.add_atom(
            element=WILDCARD,
            aromatic=False,
            charge=0,
            h=0,
            attachment=True,
            bond_id=int(label) if label is not None else None,
            organic=False,
        )
    aromatic = symbol in AROMATIC_BRACKET
    element = symbol.capitalize() if aromatic else symbol
    if element not in ELEMENTS:
        raise SmilesSyntaxError(f"未知元素: {symbol}")
    return builder.add_atom(
        element=element,
        aromatic=aromatic,
        charge=charge,
        h=hcount,
        attachment=False,
        bond_id=None,
        organic=False,
    )


def _parse_organic(token: str, builder: _Builder) -> int:
    if token == WILDCARD:
        return builder.add_atom(
            element=WILDCARD, aromatic=False, charge=0, h=0, attachment=True, bond_id=None, organic=False
        )
    aromatic = token in AROMATIC_ORGANIC
    return builder.add_atom(
        element=token.upper() if aromatic else token,
        aromatic=aromatic,
        charge=0,
        h=None,
        attachment=False,
        bond_id=None,
        organic=True,
    )


def parse_smiles(text: str) -> Molecule:
    """解析 SMILES 為 Molecule

    Args:
        text: 單一組分的 SMILES 字串

    Returns:
        補足隱含氫並計算環鍵旗標後的 Molecule

    Raises:
        SmilesSyntaxError: 語法錯誤（括號、環閉合不平衡、未知元素）
        MultiComponentError: 含有 '.'
        ValenceError: 原子超出允許價數
    """
    if not text or not text.strip():
        raise SmilesSyntaxError("SMILES 字串為空")
    text = text.strip()
    if not text.isascii():
        raise SmilesSyntaxError(f"SMILES 含有非 ASCII 字元: {text!r}")

    builder = _Builder()
    prev: Optional[int] = None
    pending: Optional[str] = None
    branches: List[int] = []
    rings: Dict[str, Tuple[int, Optional[str]]] = {}
    pos = 0

    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match:
            raise SmilesSyntaxError(f"位置 {pos} 無法解析: {text!r}")
        kind = match.lastgroup
        token = match.group(kind)
        pos = match.end()

        if kind in ("bracket", "organic"):
            index = _parse_bracket(token, builder) if kind == "bracket" else _parse_organic(token, builder)
            if prev is not None:
                builder.add_bond(prev, index, pending, text)
            elif pending is not None:
                raise SmilesSyntaxError(f"鍵符號前沒有原子: {text!r}")
            pending = None
            prev = index
        elif kind == "bond":
            if prev is None or pending is not None:
                raise SmilesSyntaxError(f"位置 {match.start()} 的鍵符號不合法: {text!r}")
            pending = token
        elif kind == "ring":
            if prev is None:
                raise SmilesSyntaxError(f"環閉合數字前沒有原子: {text!r}")
            number = token.lstrip("%")
            if number in rings:
                opener, opener_symbol = rings.pop(number)
                if opener_symbol and pending and _BOND_SYMBOLS[opener_symbol] != _BOND_SYMBOLS[pending]:
                    raise SmilesSyntaxError(f"環閉合 {number} 兩端鍵級不一致: {text!r}")
                builder.add_bond(opener, prev, pending or opener_symbol, text)
            else:
                rings[number] = (prev, pending)
            pending = None
        elif kind == "open":
            if prev is None or pending is not None:
                raise SmilesSyntaxError(f"分支位置不合法: {text!r}")
            branches.append(prev)
        elif kind == "close":
            if not branches or pending is not None:
                raise SmilesSyntaxError(f"括號不平衡: {text!r}")
            prev = branches.pop()
        else:
            raise MultiComponentError(f"不支援多組分 SMILES: {text!r}")

    if rings:
        raise SmilesSyntaxError(f"未閉合的環鍵 {', '.join(sorted(rings))}: {text!r}")
    if branches:
        raise SmilesSyntaxError(f"括號不平衡: {text!r}")
    if pending is not None:
        raise SmilesSyntaxError(f"結尾有懸空的鍵符號: {text!r}")
    if not builder.atoms:
        raise SmilesSyntaxError(f"沒有任何原子: {text!r}")

    return _finalize(builder)


def _finalize(builder: _Builder) -> Molecule:
    raw = builder.atoms

    # 先以暫定鍵級建圖取得環鍵，非環的隱式芳香鍵降為單鍵
    tentative = []
    for a, b, symbol in builder.bonds:
        if symbol is not None:
            tentative.append(Bond(a, b, _BOND_SYMBOLS[symbol]))
        elif raw[a]["aromatic"] and raw[b]["aromatic"]:
            tentative.append(Bond(a, b, BondOrder.AROMATIC))
        else:
            tentative.append(Bond(a, b, BondOrder.SINGLE))
    skeleton = Molecule([Atom(element=f["element"]) for f in raw], tentative)
    bonds = []
    for (a, b, symbol), bond, in_ring in zip(builder.bonds, tentative, skeleton.ring_bond_flags):
        if symbol is None and bond.order is BondOrder.AROMATIC and not in_ring:
            bond = Bond(a, b, BondOrder.SINGLE)
        bonds.append(bond)

    orders: List[List[BondOrder]] = [[] for _ in raw]
    for bond in bonds:
        orders[bond.begin].append(bond.order)
        orders[bond.end].append(bond.order)

    atoms = []
    for index, fields in enumerate(raw):
        if fields["attachment"]:
            if len(orders[index]) > 1:
                raise ValenceError("連接點原子 '*' 只能有一個鄰居")
            atoms.append(Atom.attachment(fields["bond_id"]))
            continue
        h = fields["h"]
        if fields["organic"]:
            h = implicit_hydrogens(fields["element"], fields["aromatic"], orders[index])
        atoms.append(
            Atom(
                element=fields["element"],
                aromatic=fields["aromatic"],
                formal_charge=fields["charge"],
                explicit_h=h,
            )
        )

    return _fold_hydrogens(atoms, bonds)


def _fold_hydrogens(atoms: List[Atom], bonds: List[Bond]) -> Molecule:
    """把只連一個重原子的 [H] 併入該原子的氫數"""
    degree = [0] * len(atoms)
    for bond in bonds:
        degree[bond.begin] += 1
        degree[bond.end] += 1
    folded = set()
    atoms = list(atoms)
    for bond in bonds:
        for h_index, heavy in ((bond.begin, bond.end), (bond.end, bond.begin)):
            h_atom = atoms[h_index]
            if (
                h_atom.element == "H"
                and h_atom.formal_charge == 0
                and degree[h_index] == 1
                and bond.order is BondOrder.SINGLE
                and atoms[heavy].element not in ("H", WILDCARD)
                and h_index not in folded
            ):
                folded.add(h_index)
                atoms[heavy] = atoms[heavy].with_hydrogens(atoms[heavy].explicit_h + 1)
    if not folded:
        return Molecule(atoms, bonds)
    remap = {}
    kept = []
    for index, atom in enumerate(atoms):
        if index not in folded:
            remap[index] = len(kept)
            kept.append(atom)
    kept_bonds = [
        Bond(remap[b.begin], remap[b.end], b.order)
        for b in bonds
        if b.begin not in folded and b.end not in folded
    ]
    return Molecule(kept, kept_bonds)


def _atom_token(molecule: Molecule, index: int, label_attachments: bool) -> str:
    atom = molecule.atoms[index]
    if atom.is_attachment:
        if label_attachments and atom.attachment_bond_id is not None:
            return f"[*:{atom.attachment_bond_id}]"
        return WILDCARD

    symbol = atom.element.lower() if atom.aromatic else atom.element
    if atom.formal_charge == 0 and atom.element in ORGANIC_SUBSET and (
        not atom.aromatic or symbol in AROMATIC_ORGANIC
    ):
        orders = [order for _, order in molecule.neighbors(index)]
        try:
            if implicit_hydrogens(atom.element, atom.aromatic, orders) == atom.explicit_h:
                return symbol
        except ValenceError:
            pass

    text = "[" + symbol
    if atom.explicit_h:
        text += "H" + (str(atom.explicit_h) if atom.explicit_h > 1 else "")
    if atom.formal_charge:
        sign = "+" if atom.formal_charge > 0 else "-"
        magnitude = abs(atom.formal_charge)
        text += sign + (str(magnitude) if magnitude > 1 else "")
    return text + "]"


def _bond_symbol(molecule: Molecule, bond_index: int) -> str:
    bond = molecule.bonds[bond_index]
    both_aromatic = molecule.atoms[bond.begin].aromatic and molecule.atoms[bond.end].aromatic
    if bond.order is BondOrder.SINGLE:
        return "-" if both_aromatic else ""
    if bond.order is BondOrder.DOUBLE:
        return "="
    if bond.order is BondOrder.TRIPLE:
        return "#"
    if both_aromatic and molecule.is_ring_bond(bond_index):
        return ""
    return ":"


def _ring_label(number: int) -> str:
    return str(number) if number < 10 else f"%{number}"


def write_smiles(molecule: Molecule, label_attachments: bool = False) -> str:
    """將 Molecule 輸出為 SMILES（非正規化）

    先以 DFS 區分樹邊與環閉合邊，再依相同順序輸出；
    單鍵連接兩個芳香原子時寫出 '-'，保證重新解析後同構。

    Args:
        molecule: 分子
        label_attachments: 是否以 [*:n] 寫出連接點的斷鍵編號

    Returns:
        SMILES 字串；多個連通分量以 '.' 分隔
    """
    n = len(molecule.atoms)
    if n == 0:
        return ""

    visited = [False] * n
    children: List[List[Tuple[int, int]]] = [[] for _ in range(n)]
    closures: List[List[Tuple[int, int]]] = [[] for _ in range(n)]
    classified = set()
    roots = []

    for root in range(n):
        if visited[root]:
            continue
        roots.append(root)
        visited[root] = True
        stack = [(root, iter(sorted(molecule.neighbors(root))))]
        while stack:
            atom, neighbors = stack[-1]
            advanced = False
            for nbr, _ in neighbors:
                bond_index = molecule.bond_index(atom, nbr)
                if bond_index in classified:
                    continue
                classified.add(bond_index)
                if visited[nbr]:
                    # 回邊：nbr 為祖先，在 nbr 開環、在 atom 閉環
                    closures[nbr].append((bond_index, atom))
                    closures[atom].append((bond_index, nbr))
                    continue
                visited[nbr] = True
                children[atom].append((bond_index, nbr))
                stack.append((nbr, iter(sorted(molecule.neighbors(nbr)))))
                advanced = True
                break
            if not advanced:
                stack.pop()

    pieces: List[str] = []
    for root in roots:
        out: List[str] = []
        open_rings: Dict[int, int] = {}
        free: List[int] = []
        next_number = 1
        work: List[object] = [root]
        while work:
            item = work.pop()
            if isinstance(item, str):
                out.append(item)
                continue
            atom = item
            out.append(_atom_token(molecule, atom, label_attachments))
            for bond_index, partner in closures[atom]:
                if bond_index in open_rings:
                    number = open_rings.pop(bond_index)
                    out.append(_bond_symbol(molecule, bond_index) + _ring_label(number))
                    free.append(number)
                    free.sort()
                else:
                    if free:
                        number = free.pop(0)
                    else:
                        number = next_number
                        next_number += 1
                    open_rings[bond_index] = number
                    out.append(_ring_label(number))
            kids = children[atom]
            # 反向壓入堆疊；最後一個子節點不加括號
            for position in range(len(kids) - 1, -1, -1):
                bond_index, child = kids[position]
                if position < len(kids) - 1:
                    work.append(")")
                    work.append(child)
                    work.append("(" + _bond_symbol(molecule, bond_index))
                else:
                    work.append(child)
                    work.append(_bond_symbol(molecule, bond_index))
        pieces.append("".join(out))
    return ".".join(pieces)
