"""以 Python int 表示的片段成員位元集合工具"""

from typing import Iterable, Iterator, Tuple


def bit(index: int) -> int:
    return 1 << index


def from_indices(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def iter_bits(mask: int) -> Iterator[int]:
    """依遞增順序列出位元集合中的索引"""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_indices(mask: int) -> Tuple[int, ...]:
    return tuple(iter_bits(mask))


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def lowest(mask: int) -> int:
    """最低位元索引；mask 必須非零"""
    return (mask & -mask).bit_length() - 1


def full_mask(k: int) -> int:
    return (1 << k) - 1
