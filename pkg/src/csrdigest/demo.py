"""Tamper scenarios on the bundled certificate document.

Each scenario signs ``/Certificate/Results``, tampers with the document, and
compares a content-only DOM-HASH digest of the signed subtree (unchanged in
every scenario) with the CSR verdict (which names the tampered facet).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterable

from .baselines import dom_hash_digest
from .csr import Facet, Verdict, csr_digest, facet_report, timestamped_seal, verify
from .hashing import HashAlgorithm
from .manifest import IntegrityManifest, emit_manifest, parse_manifest
from .tree import XmlNode, move, node_at, parse_document, replace_at, resolve, select_node

TARGET = "/Certificate/Results"
CONTEXT = "/Certificate/Measurements"
CREATED = "2009-04-10T00:00:00Z"
COPIED = "2010-01-15T09:30:00Z"


def certificate_bytes() -> bytes:
    return resources.files("csrdigest").joinpath("data/certificate.xml").read_bytes()


def load_certificate() -> XmlNode:
    return parse_document(certificate_bytes())


def sign(
    root: XmlNode,
    target: str,
    context: Iterable[str] = (),
    algo: HashAlgorithm | str = HashAlgorithm.SHA1,
    timestamp: str | None = None,
) -> IntegrityManifest:
    """Digest, optionally seal, and round-trip through the manifest wire format."""
    context = tuple(context)
    digest = csr_digest(root, target, context, algo)
    if timestamp is not None:
        timestamped_seal(digest, timestamp)
    return parse_manifest(emit_manifest(digest, target, context))


@dataclass
class DemoResult:
    scenario: str
    expected_facet: Facet
    verdict: Verdict
    facets: dict[Facet, bool | None]
    content_only_unchanged: bool
    transcript: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """The content-only digest missed the tamper and CSR caught it on the expected facet."""
        return self.content_only_unchanged and not self.verdict and self.verdict.facet is self.expected_facet

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "expected_facet": self.expected_facet.value,
            "verdict": "pass" if self.verdict else "fail",
            "facet": self.verdict.facet.value if self.verdict.facet else None,
            "detail": self.verdict.detail,
            "facets": {f.value: v for f, v in self.facets.items()},
            "content_only_unchanged": self.content_only_unchanged,
            "ok": self.ok,
        }


def _facet_lines(facets: dict[Facet, bool | None]) -> list[str]:
    word = {True: "ok", False: "FAIL", None: "n/a"}
    return [f"  {f.value:<10} {word[v]}" for f, v in facets.items()]


def _finish(
    name: str,
    expected: Facet,
    tampered: XmlNode,
    manifest: IntegrityManifest,
    dom_before: str,
    dom_after: str,
    lines: list[str],
) -> DemoResult:
    unchanged = dom_before == dom_after
    lines.append(
        f"DOM-HASH of signed subtree: before {dom_before[:16]}... after {dom_after[:16]}... -> "
        + ("unchanged, a content-only signature still verifies" if unchanged else "changed")
    )
    facets = facet_report(tampered, manifest)
    verdict = verify(tampered, manifest)
    lines.append("CSR facets:")
    lines.extend(_facet_lines(facets))
    lines.append(f"CSR verdict: {verdict}")
    result = DemoResult(name, expected, verdict, facets, unchanged, lines)
    lines.append(f"expected facet {expected.value}: {'detected' if result.ok else 'NOT DETECTED'}")
    return result


def demo_relocate(algo: HashAlgorithm | str = HashAlgorithm.SHA1) -> DemoResult:
    root = load_certificate()
    manifest = sign(root, TARGET, algo=algo)
    lines = [f"signed {TARGET} with CSR ({HashAlgorithm.parse(algo).value}), no context"]
    source = resolve(root, TARGET)
    parent = resolve(root, CONTEXT)
    tampered = move(root, source, parent, len(node_at(root, parent).children))
    moved = f"{CONTEXT}/Results"
    lines.append(f"attack: moved {TARGET} to {moved}")
    lines.append(f"verify with the original reference: {verify(tampered, manifest)}")
    # follow the element to its new home, as an id-based reference would
    rebound = dataclasses.replace(manifest, target=moved)
    lines.append(f"re-pointing the reference at {moved}:")
    return _finish(
        "relocate",
        Facet.STRUCTURE,
        tampered,
        rebound,
        dom_hash_digest(node_at(root, source), algo).hex(),
        dom_hash_digest(select_node(tampered, moved), algo).hex(),
        lines,
    )


def demo_copy(algo: HashAlgorithm | str = HashAlgorithm.SHA1) -> DemoResult:
    base = load_certificate()
    original = base.replace(attributes=(("created", CREATED),))
    manifest = sign(original, TARGET, algo=algo, timestamp=CREATED)
    lines = [f"signed {TARGET} with CSR ({HashAlgorithm.parse(algo).value}), sealed at {CREATED}"]
    lines.append(f"verify the original document: {verify(original, manifest)}")

    elsewhere = XmlNode("Archive", children=(XmlNode("Folder", children=(select_node(original, TARGET),)),))
    relocated = dataclasses.replace(manifest, target="/Archive/Folder/Results")
    lines.append(
        "copy into a structurally different document (/Archive/Folder/Results): "
        f"{verify(elsewhere, relocated)}"
    )

    copy = base.replace(attributes=(("created", COPIED),))
    lines.append(f"attack: copied {TARGET} into an identical document created {COPIED}")
    return _finish(
        "copy",
        Facet.TIMESTAMP,
        copy,
        manifest,
        dom_hash_digest(select_node(original, TARGET), algo).hex(),
        dom_hash_digest(select_node(copy, TARGET), algo).hex(),
        lines,
    )


def demo_context_swap(algo: HashAlgorithm | str = HashAlgorithm.SHA1) -> DemoResult:
    root = load_certificate()
    manifest = sign(root, TARGET, [CONTEXT], algo=algo)
    lines = [f"signed {TARGET} with CSR ({HashAlgorithm.parse(algo).value}), context {CONTEXT}"]
    position = resolve(root, CONTEXT)
    forged = XmlNode(
        "Measurements",
        children=(
            XmlNode("Description", "Visual inspection only, no spectral attenuation measured"),
            XmlNode("Table", "Designed figure used in measurement"),
        ),
    )
    tampered = replace_at(root, position, forged)
    lines.append(f"attack: replaced {CONTEXT} with a different measurement method")
    return _finish(
        "context-swap",
        Facet.CONTEXT,
        tampered,
        manifest,
        dom_hash_digest(select_node(root, TARGET), algo).hex(),
        dom_hash_digest(select_node(tampered, TARGET), algo).hex(),
        lines,
    )


SCENARIOS: dict[str, Callable[..., DemoResult]] = {
    "relocate": demo_relocate,
    "copy": demo_copy,
    "context-swap": demo_context_swap,
}
