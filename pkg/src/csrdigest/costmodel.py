"""Analytical cost model for digesting complete k-ary trees."""

from __future__ import annotations

from dataclasses import dataclass

from .tree import XmlNode, walk


def _check(k: int, m: int) -> None:
    if k < 2:
        raise ValueError(f"branching factor k must be >= 2 (closed form divides by k-1), got {k}")
    if m < 1:
        raise ValueError(f"depth m must be >= 1, got {m}")


def node_count_N(k: int, m: int) -> int:
    """Nodes of a complete k-ary tree of depth m: (k^m - 1) / (k - 1)."""
    _check(k, m)
    return (k**m - 1) // (k - 1)


def hash_count_W(k: int, m: int) -> int:
    """Hashes when each node at level x costs x: (m k^(m+1) - (m+1) k^m + 1) / (k-1)^2."""
    _check(k, m)
    return (m * k ** (m + 1) - (m + 1) * k**m + 1) // (k - 1) ** 2


def node_count_sum(k: int, m: int) -> int:
    return sum(k ** (x - 1) for x in range(1, m + 1))


def hash_count_sum(k: int, m: int) -> int:
    return sum(x * k ** (x - 1) for x in range(1, m + 1))


@dataclass(frozen=True)
class CostModelParams:
    c1: float
    c2: float
    D: int
    c: float = 1.0
    c_prime: float = 1.0

    def __post_init__(self) -> None:
        for name in ("c1", "c2", "D", "c", "c_prime"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")


def time_model_T(l: int, params: CostModelParams) -> float:
    """Cost of hashing an l-byte input: c1 * (floor(l / D) + 1) + c2."""
    if l < 0:
        raise ValueError(f"input length must be non-negative, got {l}")
    return params.c1 * (l // params.D + 1) + params.c2


@dataclass(frozen=True)
class TreeShape:
    k: int
    m: int
    node_size: int
    depth_size: int

    @classmethod
    def complete(cls, k: int, m: int) -> "TreeShape":
        _check(k, m)
        depth_size = sum((x - 1) * k ** (x - 1) for x in range(1, m + 1))
        return cls(k, m, node_count_N(k, m), depth_size)

    @classmethod
    def of(cls, root: XmlNode) -> "TreeShape":
        """Measure a concrete tree; k is its widest fan-out (at least 2)."""
        node_size = depth_size = height = 0
        k = 2
        for pos, node in walk(root):
            node_size += 1
            depth_size += len(pos)
            height = max(height, len(pos) + 1)
            k = max(k, len(node.children))
        return cls(k, height, node_size, depth_size)


def rehash_overhead(shape: TreeShape, params: CostModelParams) -> float:
    """c * S_n + c' * S_d, the linear rehashing (and verification) cost."""
    return params.c * shape.node_size + params.c_prime * shape.depth_size
