"""Competing tree digests, instrumented with the same hash counter as CSR.

* DOM-HASH: ``dos(v) = h(elem || text || pi)`` and
  ``Res(v) = h(h(attr) || dos(v) || <child digests>)``.
* XHASH: DOM-HASH with a whitespace mode, ``default`` or ``preserved``.
* Bertino's Merkle model: ``h(h(val) || h(name))`` for attribute nodes and
  ``h(h(content) || h(tagname) || <child digests>)`` for elements.

Concatenations use the same length-prefix framing as the CSR digests.
"""

from __future__ import annotations

from typing import Callable, Literal

from .hashing import Digest, HashAlgorithm, HashCounter, frame, frames
from .tree import XmlNode, fold

SpaceMode = Literal["default", "preserved"]


def _attr_bytes(node: XmlNode) -> bytes:
    return b"".join(frame(f"{k}\0{v}") for k, v in node.attributes)


def _pi_bytes(node: XmlNode) -> bytes:
    # no processing instructions -> empty operand
    return b"".join(frame(p) for p in node.pis)


def _dom_recursion(
    root: XmlNode, algo: HashAlgorithm, counter: HashCounter, text_of: Callable[[XmlNode], str]
) -> Digest:
    def dos(n: XmlNode) -> Digest:
        return counter.hash(algo, frames(n.name, text_of(n), _pi_bytes(n)))

    def res(n: XmlNode, own: Digest, kids: list[Digest]) -> Digest:
        attr = counter.hash(algo, _attr_bytes(n))
        parts = [frame(attr.value), frame(own.value)]
        parts.extend(frame(k.value) for k in kids)
        return counter.hash(algo, b"".join(parts))

    # An element without children or attributes enters its parent as dos(v)
    # alone; every other element contributes Res(v).
    def visit(n: XmlNode, kids: list[tuple[Digest, XmlNode | None]]) -> tuple[Digest, XmlNode | None]:
        own = dos(n)
        if not n.children and not n.attributes:
            return own, n
        return res(n, own, [d for d, _ in kids]), None

    digest, bare = fold(root, visit)
    if bare is not None:
        digest = res(bare, digest, [])
    return digest


def dom_hash_digest(
    root: XmlNode, algo: HashAlgorithm | str = HashAlgorithm.SHA1, counter: HashCounter | None = None
) -> Digest:
    """DOM-HASH over the tree. ``<a/>`` costs 3 hashes (h(attr), dos, Res); each
    further bare leaf costs 1 and every other element 3."""
    algo = HashAlgorithm.parse(algo)
    counter = counter if counter is not None else HashCounter()
    return _dom_recursion(root, algo, counter, lambda n: n.value)


def xhash_digest(
    root: XmlNode,
    algo: HashAlgorithm | str = HashAlgorithm.SHA1,
    counter: HashCounter | None = None,
    space_mode: SpaceMode = "default",
) -> Digest:
    """XHASH: the DOM-HASH recursion where ``preserved`` keeps whitespace-only
    text runs and ``default`` drops them as the parser does."""
    if space_mode not in ("default", "preserved"):
        raise ValueError(f"space_mode must be 'default' or 'preserved', got {space_mode!r}")
    algo = HashAlgorithm.parse(algo)
    counter = counter if counter is not None else HashCounter()
    text_of = (lambda n: n.text) if space_mode == "preserved" else (lambda n: n.value)
    return _dom_recursion(root, algo, counter, text_of)


def bertino_attribute_digest(
    name: str, value: str, algo: HashAlgorithm | str = HashAlgorithm.SHA1, counter: HashCounter | None = None
) -> Digest:
    """``h(h(value) || h(name))``: three hashes."""
    algo = HashAlgorithm.parse(algo)
    counter = counter if counter is not None else HashCounter()
    hv = counter.hash(algo, frame(value))
    hn = counter.hash(algo, frame(name))
    return counter.hash(algo, frames(hv.value, hn.value))


def bertino_digest(
    root: XmlNode,
    algo: HashAlgorithm | str = HashAlgorithm.SHA1,
    counter: HashCounter | None = None,
    include_attributes: bool = True,
) -> Digest:
    """Merkle-tree digest: three hashes per element plus three per attribute.

    Attributes enter as Merkle children ahead of the element children. Pass
    ``include_attributes=False`` for the original model, which leaves them
    unprotected.
    """
    algo = HashAlgorithm.parse(algo)
    counter = counter if counter is not None else HashCounter()

    def visit(n: XmlNode, kids: list[Digest]) -> Digest:
        content = counter.hash(algo, frame(n.value))
        tag = counter.hash(algo, frame(n.name))
        parts = [frame(content.value), frame(tag.value)]
        if include_attributes:
            parts.extend(
                frame(bertino_attribute_digest(k, v, algo, counter).value) for k, v in n.attributes
            )
        parts.extend(frame(d.value) for d in kids)
        return counter.hash(algo, b"".join(parts))

    return fold(root, visit)
