"""Hash primitives: algorithm identifiers, fixed-width digests, counted hashing.

Every concatenation fed to a hash is length-prefix framed with :func:`frame` so
that ``h(a || b)`` can never collide with ``h(a' || b')`` by moving bytes
across the boundary.
"""

from __future__ import annotations

import enum
import hashlib
import struct
from dataclasses import dataclass


class HashAlgorithm(enum.Enum):
    SHA1 = "sha1"
    SHA256 = "sha256"

    @property
    def width(self) -> int:
        return 20 if self is HashAlgorithm.SHA1 else 32

    @property
    def uri(self) -> str:
        return _URIS[self]

    @classmethod
    def from_uri(cls, uri: str) -> "HashAlgorithm":
        for algo, known in _URIS.items():
            if known == uri:
                return algo
        raise ValueError(f"unsupported DigestMethod algorithm {uri!r}")

    @classmethod
    def parse(cls, name: "str | HashAlgorithm") -> "HashAlgorithm":
        if isinstance(name, HashAlgorithm):
            return name
        key = name.strip().lower().replace("-", "")
        for algo in cls:
            if algo.value == key:
                return algo
        raise ValueError(f"unknown hash algorithm {name!r} (expected sha1 or sha256)")


_URIS = {
    HashAlgorithm.SHA1: "http://www.w3.org/2000/09/xmldsig#sha1",
    HashAlgorithm.SHA256: "http://www.w3.org/2001/04/xmlenc#sha256",
}


@dataclass(frozen=True)
class Digest:
    algorithm: HashAlgorithm
    value: bytes

    def __post_init__(self) -> None:
        if len(self.value) != self.algorithm.width:
            raise ValueError(
                f"{self.algorithm.name} digest must be {self.algorithm.width} octets,"
                f" got {len(self.value)}"
            )

    def hex(self) -> str:
        return self.value.hex()

    def __bytes__(self) -> bytes:
        return self.value


class HashCounter:
    """Counts one-shot hash invocations.

    One counter belongs to one computation; it is not thread-safe and is not
    meant to be shared between threads.
    """

    __slots__ = ("_count",)

    def __init__(self) -> None:
        self._count = 0

    @property
    def count(self) -> int:
        return self._count

    def hash(self, algo: HashAlgorithm, data: bytes) -> Digest:
        self._count += 1
        return Digest(algo, hashlib.new(algo.value, data).digest())

    def __repr__(self) -> str:
        return f"HashCounter(count={self._count})"


_LEN = struct.Struct(">I")


def frame(item: bytes | str) -> bytes:
    """4-byte big-endian length prefix followed by the item's bytes (UTF-8 for text)."""
    if isinstance(item, str):
        item = item.encode("utf-8")
    return _LEN.pack(len(item)) + item


def frames(*items: bytes | str) -> bytes:
    return b"".join(frame(i) for i in items)
