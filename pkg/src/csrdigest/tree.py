"""Canonical ordered XML tree: parsing, node labels, labelled paths, selectors.

The tree keeps only what the digest schemes consume: element name, the
concatenated direct text (``value``), a sorted attribute list and the element
children in document order. Comments, namespace declarations and the DTD are
not part of the model. Processing instructions are kept on a side channel for
the DOM-HASH baseline only.

Trees are immutable; the edit helpers at the bottom return new trees.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence
from xml.parsers import expat

from .errors import SelectorError, ValidationError, XmlParseError
from .hashing import frame

Position = tuple[int, ...]

_NAME_START = (
    r"A-Za-z_:\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF"
    r"\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD"
)
_NAME_CHAR = _NAME_START + r"\-.0-9\u00B7\u0300-\u036F\u203F-\u2040"
_NAME = f"[{_NAME_START}][{_NAME_CHAR}]*"
_NAME_RE = re.compile(f"^{_NAME}$")
_SEGMENT_RE = re.compile(rf"^({_NAME})(?:\[([0-9]+)\])?$")
_XML_SPACE = " \t\n\r"


def is_xml_whitespace(text: str) -> bool:
    return text.strip(_XML_SPACE) == ""


@dataclass(frozen=True)
class XmlNode:
    """An element with its text value, sorted attributes and element children.

    ``raw_text`` (all direct text, whitespace-only runs included) and ``pis``
    are side channels: they do not take part in equality and no CSR operand
    reads them.
    """

    name: str
    value: str = ""
    attributes: tuple[tuple[str, str], ...] = ()
    children: tuple["XmlNode", ...] = ()
    raw_text: str | None = field(default=None, compare=False, repr=False)
    pis: tuple[str, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not _NAME_RE.match(self.name):
            raise ValidationError(f"invalid element name {self.name!r}")
        attrs = tuple(sorted((str(k), str(v)) for k, v in self.attributes))
        for (a, _), (b, _) in zip(attrs, attrs[1:]):
            if a == b:
                raise ValidationError(f"duplicate attribute {a!r} on <{self.name}>")
        for a, _ in attrs:
            if not _NAME_RE.match(a):
                raise ValidationError(f"invalid attribute name {a!r} on <{self.name}>")
        object.__setattr__(self, "attributes", attrs)
        object.__setattr__(self, "children", tuple(self.children))
        object.__setattr__(self, "pis", tuple(self.pis))

    @property
    def text(self) -> str:
        """Direct text with whitespace-only runs kept (falls back to ``value``)."""
        return self.value if self.raw_text is None else self.raw_text

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def attribute(self, name: str, default: str | None = None) -> str | None:
        for k, v in self.attributes:
            if k == name:
                return v
        return default

    def replace(self, **changes) -> "XmlNode":
        """Copy with fields replaced. Side channels follow ``value`` unless given."""
        if "value" in changes and "raw_text" not in changes:
            changes["raw_text"] = None
        fields = {
            "name": self.name,
            "value": self.value,
            "attributes": self.attributes,
            "children": self.children,
            "raw_text": self.raw_text,
            "pis": self.pis,
        }
        fields.update(changes)
        return XmlNode(**fields)


@dataclass(frozen=True, order=True)
class NodeLabel:
    level: int
    order: int

    def __post_init__(self) -> None:
        if self.level < 1 or self.order < 1:
            raise ValueError(f"label components are 1-based, got {self.level}.{self.order}")

    def __str__(self) -> str:
        return f"{self.level}.{self.order}"


@dataclass(frozen=True)
class NodePath:
    segments: tuple[tuple[str, NodeLabel], ...]

    @property
    def rendered(self) -> str:
        return "/".join(f"{name}[{label}]" for name, label in self.segments)

    @property
    def label(self) -> NodeLabel:
        return self.segments[-1][1]

    def __str__(self) -> str:
        return self.rendered


# -- parsing -----------------------------------------------------------------


class _Frame:
    __slots__ = ("name", "attrs", "segments", "buf", "children", "pis")

    def __init__(self, name: str, attrs: list[tuple[str, str]]) -> None:
        self.name = name
        self.attrs = attrs
        self.segments: list[str] = []
        self.buf: list[str] = []
        self.children: list[XmlNode] = []
        self.pis: list[str] = []

    def flush(self) -> None:
        if self.buf:
            self.segments.append("".join(self.buf))
            self.buf = []

    def build(self) -> XmlNode:
        self.flush()
        value = "".join(s for s in self.segments if not is_xml_whitespace(s))
        raw = "".join(self.segments)
        return XmlNode(self.name, value, tuple(self.attrs), tuple(self.children), raw, tuple(self.pis))


_DUPLICATE_ATTR = expat.errors.codes[expat.errors.XML_ERROR_DUPLICATE_ATTRIBUTE]


def parse_document(data: bytes | str) -> XmlNode:
    """Parse XML into the canonical tree and return its root.

    Raises :class:`XmlParseError` (with the byte offset) on malformed input or a
    DOCTYPE declaration, and :class:`ValidationError` on duplicate attributes.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    parser = expat.ParserCreate()
    parser.buffer_text = True
    parser.ordered_attributes = True

    stack: list[_Frame] = []
    result: list[XmlNode] = []
    prolog_pis: list[str] = []

    def start(name: str, attr_list: list[str]) -> None:
        attrs = [
            (attr_list[i], attr_list[i + 1])
            for i in range(0, len(attr_list), 2)
            if attr_list[i] != "xmlns" and not attr_list[i].startswith("xmlns:")
        ]
        if stack:
            stack[-1].flush()
        stack.append(_Frame(name, attrs))

    def end(name: str) -> None:
        node = stack.pop().build()
        if stack:
            stack[-1].flush()
            stack[-1].children.append(node)
        else:
            result.append(node)

    def chars(text: str) -> None:
        if stack:
            stack[-1].buf.append(text)

    def pi(target: str, data: str) -> None:
        text = f"{target} {data}" if data else target
        (stack[-1].pis if stack else prolog_pis).append(text)

    def doctype(*_args) -> None:
        raise XmlParseError("DOCTYPE declarations are not supported", parser.CurrentByteIndex)

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.ProcessingInstructionHandler = pi
    parser.StartDoctypeDeclHandler = doctype
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        if exc.code == _DUPLICATE_ATTR:
            raise ValidationError(
                f"duplicate attribute at line {exc.lineno}, column {exc.offset}"
            ) from None
        message = expat.errors.messages[exc.code]
        raise XmlParseError(message, parser.ErrorByteIndex) from None

    root = result[0]
    if prolog_pis:
        root = root.replace(pis=tuple(prolog_pis) + root.pis)
    return root


# -- navigation ----------------------------------------------------------------


def walk(root: XmlNode) -> Iterator[tuple[Position, XmlNode]]:
    """Yield (position, node) in document order; a position is the tuple of child indices."""
    stack: list[tuple[Position, XmlNode]] = [((), root)]
    while stack:
        pos, node = stack.pop()
        yield pos, node
        for i in range(len(node.children) - 1, -1, -1):
            stack.append((pos + (i,), node.children[i]))


def node_at(root: XmlNode, position: Sequence[int]) -> XmlNode:
    node = root
    for i in position:
        node = node.children[i]
    return node


def selector_at(root: XmlNode, position: Sequence[int]) -> str:
    """The canonical selector ("/A/B[2]/C") addressing the node at ``position``."""
    parts = [root.name]
    node = root
    for i in position:
        child = node.children[i]
        nth = sum(1 for c in node.children[: i + 1] if c.name == child.name)
        parts.append(child.name if nth == 1 else f"{child.name}[{nth}]")
        node = child
    return "/" + "/".join(parts)


def resolve(root: XmlNode, selector: str) -> Position:
    """Resolve a selector to a node position.

    Two forms are accepted: absolute paths "/Name/Name[i]/Name" where ``[i]``
    is the 1-based index among same-named siblings, and "#value" fragments
    matching a unique ``id`` attribute.
    """
    selector = selector.strip()
    if selector.startswith("#"):
        return _resolve_fragment(root, selector)
    if not selector.startswith("/") or selector == "/":
        raise SelectorError(f"selector must be an absolute path, got {selector!r}")

    steps = selector[1:].split("/")
    parsed = []
    for step in steps:
        m = _SEGMENT_RE.match(step)
        if not m:
            raise SelectorError(f"malformed selector segment {step!r} in {selector!r}")
        index = int(m.group(2) or 1)
        if index < 1:
            raise SelectorError(f"selector indices are 1-based: {step!r} in {selector!r}")
        parsed.append((m.group(1), index))

    name, index = parsed[0]
    if name != root.name or index != 1:
        raise SelectorError(f"no match for segment {steps[0]!r} in {selector!r}")
    node = root
    position: list[int] = []
    for step, (name, index) in zip(steps[1:], parsed[1:]):
        seen = 0
        for i, child in enumerate(node.children):
            if child.name == name:
                seen += 1
                if seen == index:
                    position.append(i)
                    node = child
                    break
        else:
            raise SelectorError(f"no match for segment {step!r} in {selector!r}")
    return tuple(position)


def _resolve_fragment(root: XmlNode, selector: str) -> Position:
    wanted = selector[1:]
    hits = [pos for pos, node in walk(root) if node.attribute("id") == wanted]
    if not hits:
        raise SelectorError(f"no element with id {wanted!r}")
    if len(hits) > 1:
        raise SelectorError(f"{len(hits)} elements share id {wanted!r}")
    return hits[0]


def select_node(root: XmlNode, selector: str) -> XmlNode:
    """Return the node addressed by ``selector`` (the tree's own object, not a copy)."""
    return node_at(root, resolve(root, selector))


def label_at(position: Sequence[int]) -> NodeLabel:
    return NodeLabel(len(position) + 1, position[-1] + 1 if position else 1)


def path_at(root: XmlNode, position: Sequence[int]) -> NodePath:
    segments = [(root.name, NodeLabel(1, 1))]
    node = root
    for depth, i in enumerate(position):
        node = node.children[i]
        segments.append((node.name, NodeLabel(depth + 2, i + 1)))
    return NodePath(tuple(segments))


def node_label(root: XmlNode, target: str) -> NodeLabel:
    """(level, order) of the target: level counts path nodes, root inclusive;
    order is the 1-based index among all element siblings."""
    return label_at(resolve(root, target))


def node_path(root: XmlNode, target: str) -> NodePath:
    return path_at(root, resolve(root, target))


def canonical_bytes(node: XmlNode) -> bytes:
    """frame(name) ++ frame(value) ++ frame(attr name NUL attr value) per sorted attribute."""
    parts = [frame(node.name), frame(node.value)]
    parts.extend(frame(f"{k}\0{v}") for k, v in node.attributes)
    return b"".join(parts)


# -- editing -------------------------------------------------------------------


def replace_at(root: XmlNode, position: Sequence[int], new: XmlNode) -> XmlNode:
    if not position:
        return new
    i, rest = position[0], position[1:]
    children = list(root.children)
    children[i] = replace_at(children[i], rest, new)
    return root.replace(children=tuple(children))


def remove_at(root: XmlNode, position: Sequence[int]) -> tuple[XmlNode, XmlNode]:
    """Detach the node at ``position``; returns (new root, detached node)."""
    if not position:
        raise ValueError("cannot remove the document root")
    parent_pos, i = tuple(position[:-1]), position[-1]
    parent = node_at(root, parent_pos)
    detached = parent.children[i]
    children = parent.children[:i] + parent.children[i + 1 :]
    return replace_at(root, parent_pos, parent.replace(children=children)), detached


def insert_at(root: XmlNode, parent_position: Sequence[int], index: int, node: XmlNode) -> XmlNode:
    parent = node_at(root, parent_position)
    children = parent.children[:index] + (node,) + parent.children[index:]
    return replace_at(root, parent_position, parent.replace(children=children))


def move(
    root: XmlNode, source: Sequence[int], parent_position: Sequence[int], index: int
) -> XmlNode:
    """Move the subtree at ``source`` under ``parent_position`` at child ``index``.

    ``parent_position`` and ``index`` address the tree after the subtree has
    been detached.
    """
    pruned, subtree = remove_at(root, source)
    return insert_at(pruned, parent_position, index, subtree)


# -- serialization ---------------------------------------------------------------


def _escape_text(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace("\r", "&#13;")
    )


def _escape_attr(text: str) -> str:
    return (
        _escape_text(text)
        .replace('"', "&quot;")
        .replace("\t", "&#9;")
        .replace("\n", "&#10;")
    )


def serialize(root: XmlNode, indent: str | None = "  ", declaration: bool = True) -> bytes:
    """Render the tree as UTF-8 XML that parses back to an equal tree.

    Elements holding both text and children are written compactly so that
    indentation never merges into their value.
    """
    out: list[str] = ['<?xml version="1.0" encoding="UTF-8"?>\n'] if declaration else []

    def emit_compact(node: XmlNode) -> None:
        attrs = "".join(f' {k}="{_escape_attr(v)}"' for k, v in node.attributes)
        if not node.children and not node.value:
            out.append(f"<{node.name}{attrs}/>")
            return
        out.append(f"<{node.name}{attrs}>{_escape_text(node.value)}")
        for child in node.children:
            emit_compact(child)
        out.append(f"</{node.name}>")

    if indent is None:
        emit_compact(root)
    else:
        _emit_pretty(root, 0, indent, out, emit_compact)
    out.append("\n")
    return "".join(out).encode("utf-8")


def _emit_pretty(node: XmlNode, depth: int, indent: str, out: list[str], compact) -> None:
    pad = indent * depth
    if node.value or not node.children:
        out.append(pad)
        compact(node)
        return
    attrs = "".join(f' {k}="{_escape_attr(v)}"' for k, v in node.attributes)
    out.append(f"{pad}<{node.name}{attrs}>\n")
    for child in node.children:
        _emit_pretty(child, depth + 1, indent, out, compact)
        out.append("\n")
    out.append(f"{pad}</{node.name}>")


def fold(root: XmlNode, visit):
    """Bottom-up evaluation without recursion: ``visit(node, child_results)``
    is called once per node, children before parents, and the root's result
    is returned."""
    stack: list[tuple[XmlNode, list]] = [(root, [])]
    index = [0]
    while True:
        node, results = stack[-1]
        i = index[-1]
        if i < len(node.children):
            index[-1] = i + 1
            stack.append((node.children[i], []))
            index.append(0)
            continue
        value = visit(node, results)
        stack.pop()
        index.pop()
        if not stack:
            return value
        stack[-1][1].append(value)
