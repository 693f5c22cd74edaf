"""CSR digests: content, structure and context-referential integrity.

A signed element ``v`` is bound by three facets:

* content (CI): a concatenated-hash digest over the element's own canonical
  bytes and the CI values of its children;
* structure (ST): the digest of the labelled root-to-node path;
* context (CRI): the digest of the CI and ST of every signer-chosen
  context-related element, or empty when none were chosen.

They are combined into ``csr = h(ci || st || cri)`` and optionally sealed with a
creation timestamp, ``seal = h(t || csr)``.
"""

from __future__ import annotations

import datetime as _dt
import enum
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import SelectorError, ValidationError
from .hashing import Digest, HashAlgorithm, HashCounter, frame, frames
from .tree import Position, XmlNode, canonical_bytes, fold, node_at, path_at, resolve

if TYPE_CHECKING:
    from .manifest import IntegrityManifest

DEFAULT_TIMESTAMP_ATTRIBUTE = "created"


@dataclass
class CsrDigest:
    ci: Digest
    st: Digest
    cri: bytes
    csr: Digest
    seal: Digest | None = None
    timestamp: str | None = None

    @property
    def algorithm(self) -> HashAlgorithm:
        return self.csr.algorithm

    @property
    def signed_value(self) -> Digest:
        """The value a signer would sign: the seal when present, else the CSR."""
        return self.seal if self.seal is not None else self.csr


def _setup(algo, counter: HashCounter | None) -> tuple[HashAlgorithm, HashCounter]:
    return HashAlgorithm.parse(algo), counter if counter is not None else HashCounter()


def content_integrity(
    node: XmlNode, algo: HashAlgorithm | str = HashAlgorithm.SHA1, counter: HashCounter | None = None
) -> Digest:
    """Leaf: ``h(canonical)``. Element with children:
    ``h(frame(h(canonical)) ++ frame(CI(child_1)) ++ ... ++ frame(CI(child_n)))``.

    Costs one hash per leaf and two per element with children.
    """
    algo, counter = _setup(algo, counter)

    def visit(n: XmlNode, child_digests: list[Digest]) -> Digest:
        own = counter.hash(algo, canonical_bytes(n))
        if not child_digests:
            return own
        parts = [frame(own.value)]
        parts.extend(frame(d.value) for d in child_digests)
        return counter.hash(algo, b"".join(parts))

    return fold(node, visit)


def _structure_at(root: XmlNode, position: Position, algo: HashAlgorithm, counter: HashCounter) -> Digest:
    return counter.hash(algo, frame(path_at(root, position).rendered))


def structure_integrity(
    root: XmlNode,
    target: str,
    algo: HashAlgorithm | str = HashAlgorithm.SHA1,
    counter: HashCounter | None = None,
) -> Digest:
    """``h(frame(rendered labelled path))`` for the target node; one hash."""
    algo, counter = _setup(algo, counter)
    return _structure_at(root, resolve(root, target), algo, counter)


def context_positions(root: XmlNode, context: Iterable[str]) -> list[Position]:
    """Resolve a context set: every selector must resolve; duplicates collapse;
    the result is in document order of the targets."""
    return sorted({resolve(root, s) for s in context})


def context_referential_integrity(
    root: XmlNode,
    context: Iterable[str],
    algo: HashAlgorithm | str = HashAlgorithm.SHA1,
    counter: HashCounter | None = None,
) -> bytes:
    algo, counter = _setup(algo, counter)
    return _cri(root, context_positions(root, context), algo, counter)


def _cri(root: XmlNode, positions: Sequence[Position], algo: HashAlgorithm, counter: HashCounter) -> bytes:
    if not positions:
        return b""
    parts = []
    for pos in positions:
        parts.append(frame(content_integrity(node_at(root, pos), algo, counter).value))
        parts.append(frame(_structure_at(root, pos, algo, counter).value))
    return counter.hash(algo, b"".join(parts)).value


def combine(ci: Digest, st: Digest, cri: bytes, counter: HashCounter) -> Digest:
    return counter.hash(ci.algorithm, frames(ci.value, st.value, cri))


def csr_digest(
    root: XmlNode,
    target: str,
    context: Iterable[str] = (),
    algo: HashAlgorithm | str = HashAlgorithm.SHA1,
    counter: HashCounter | None = None,
) -> CsrDigest:
    algo, counter = _setup(algo, counter)
    position = resolve(root, target)
    positions = context_positions(root, context)
    ci = content_integrity(node_at(root, position), algo, counter)
    st = _structure_at(root, position, algo, counter)
    cri = _cri(root, positions, algo, counter)
    return CsrDigest(ci=ci, st=st, cri=cri, csr=combine(ci, st, cri, counter))


_RFC3339_UTC = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})[Tt](\d{2}):(\d{2}):(\d{2})(\.\d+)?([Zz]|[+-]00:00)$"
)


def validate_timestamp(t: str) -> str:
    """Accept RFC 3339 timestamps in UTC (``Z`` or a zero offset); return ``t`` unchanged."""
    m = _RFC3339_UTC.match(t) if isinstance(t, str) else None
    if not m:
        raise ValidationError(f"timestamp {t!r} is not an RFC 3339 UTC timestamp")
    try:
        _dt.datetime(*(int(g) for g in m.groups()[:6]))
    except ValueError as exc:
        raise ValidationError(f"timestamp {t!r} is out of range: {exc}") from None
    return t


def seal_value(t: str, csr: Digest, counter: HashCounter) -> Digest:
    return counter.hash(csr.algorithm, frames(t, csr.value))


def timestamped_seal(
    csr: CsrDigest,
    t: str,
    algo: HashAlgorithm | str | None = None,
    counter: HashCounter | None = None,
) -> Digest:
    """Seal the CSR with creation timestamp ``t``: ``h(frame(t) ++ frame(csr))``.

    The seal and timestamp are stored on ``csr`` and the seal is returned.
    """
    validate_timestamp(t)
    if algo is not None and HashAlgorithm.parse(algo) is not csr.algorithm:
        raise ValidationError("seal algorithm must match the CSR digest algorithm")
    counter = counter if counter is not None else HashCounter()
    seal = seal_value(t, csr.csr, counter)
    csr.seal = seal
    csr.timestamp = t
    return seal


def document_timestamp(root: XmlNode, attribute: str = DEFAULT_TIMESTAMP_ATTRIBUTE) -> str | None:
    return root.attribute(attribute)


# -- verification -----------------------------------------------------------------


class Facet(str, enum.Enum):
    CONTENT = "content"
    STRUCTURE = "structure"
    CONTEXT = "context"
    TIMESTAMP = "timestamp"


@dataclass(frozen=True)
class Verdict:
    passed: bool
    facet: Facet | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed

    def __str__(self) -> str:
        if self.passed:
            return "pass"
        return f"fail ({self.facet.value}): {self.detail}"


def _facet_checks(root: XmlNode, manifest: "IntegrityManifest", timestamp_attribute: str):
    """Yield (facet, ok, failure message) in checking order, recomputing lazily."""
    algo = manifest.algorithm
    counter = HashCounter()
    try:
        position = resolve(root, manifest.target)
    except SelectorError as exc:
        yield Facet.STRUCTURE, False, f"signed node not found: {exc}"
        return
    related = manifest.cri.related_nodes if manifest.cri is not None else ()
    try:
        positions = context_positions(root, related)
    except SelectorError as exc:
        yield Facet.STRUCTURE, False, f"context-related node not found: {exc}"
        return

    ci = content_integrity(node_at(root, position), algo, counter)
    ci_ok = ci.value == manifest.content_digest
    yield Facet.CONTENT, ci_ok, f"content digest of {manifest.target} changed"
    st = _structure_at(root, position, algo, counter)
    st_ok = st.value == manifest.sti.digest_value
    yield Facet.STRUCTURE, st_ok, f"labelled path of {manifest.target} changed"
    cri = _cri(root, positions, algo, counter)
    expected_cri = manifest.cri.digest_value if manifest.cri is not None else b""
    cri_ok = cri == expected_cri
    yield Facet.CONTEXT, cri_ok, f"context-related elements {list(related)} changed"
    if ci_ok and st_ok and cri_ok:
        # facets agree; the recorded combination must too
        csr = combine(ci, st, cri, counter)
        yield Facet.CONTENT, csr.value == manifest.csr_digest, "combined CSR digest does not match its facets"

    if manifest.seal is None:
        return
    try:
        validate_timestamp(manifest.timestamp)
    except ValidationError as exc:
        yield Facet.TIMESTAMP, False, str(exc)
        return
    doc_t = document_timestamp(root, timestamp_attribute)
    if doc_t is not None and doc_t != manifest.timestamp:
        yield Facet.TIMESTAMP, False, (
            f"document timestamp {doc_t!r} differs from sealed {manifest.timestamp!r}"
        )
        return
    # against the recorded CSR, so a timestamp verdict is independent of the other facets
    recorded = Digest(algo, manifest.csr_digest)
    sealed = seal_value(manifest.timestamp, recorded, counter).value == manifest.seal
    yield Facet.TIMESTAMP, sealed, f"seal over timestamp {manifest.timestamp!r} does not match"


def verify(
    root: XmlNode,
    manifest: "IntegrityManifest",
    timestamp_attribute: str = DEFAULT_TIMESTAMP_ATTRIBUTE,
) -> Verdict:
    """Recompute every facet from the document and compare with the manifest.

    Facets are checked in the order content, structure, context, timestamp and
    the first mismatch is reported. A target or context selector that no longer
    resolves fails the structure facet. When the manifest is sealed and the
    document carries its own creation timestamp, the two must agree.
    """
    for facet, ok, detail in _facet_checks(root, manifest, timestamp_attribute):
        if not ok:
            return Verdict(False, facet, detail)
    return Verdict(True)


def facet_report(
    root: XmlNode,
    manifest: "IntegrityManifest",
    timestamp_attribute: str = DEFAULT_TIMESTAMP_ATTRIBUTE,
) -> dict[Facet, bool | None]:
    """Outcome of every facet: True/False, or None when it was not checked."""
    report: dict[Facet, bool | None] = {f: None for f in Facet}
    for facet, ok, _ in _facet_checks(root, manifest, timestamp_attribute):
        report[facet] = ok if report[facet] is None else report[facet] and ok
    return report
