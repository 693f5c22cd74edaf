"""Integrity manifests: STI and CRI elements plus an XMLDSIG-style Reference.

Layout (element order is fixed)::

    <IntegrityManifest xmlns="http://www.example.org" [created="<timestamp>"]>
      <Reference URI="<target selector>">
        <DigestMethod Algorithm="http://www.example.org/xmldsig-csr/#CSR"/>
        <DigestValue>csr</DigestValue>
      </Reference>
      <CI name="content integrity">      CIGenerate, DigestMethod, DigestValue
      <STI name="structure integrity">   STIGenerate, DigestMethod, DigestValue
      <CRI name="referential integrity"> CRIGenerate, RelatedNode, DigestMethod, DigestValue
      <Seal name="timestamp seal">       SealGenerate, DigestMethod, DigestValue
    </IntegrityManifest>

CRI is present only when context-related elements were chosen, Seal only when
the digest was sealed. RelatedNode holds the context selectors separated by
whitespace. DigestValues are base64 by default; dash-separated hex pairs are
also accepted and can be emitted.
"""

from __future__ import annotations

import base64
import binascii
import re
from dataclasses import dataclass, field
from typing import Iterable, Literal

from .csr import CsrDigest
from .errors import DigestFormatError, ManifestError, XmlParseError, ValidationError
from .hashing import HashAlgorithm
from .tree import XmlNode, parse_document, serialize

NAMESPACE = "http://www.example.org"
CSR_URI = "http://www.example.org/xmldsig-csr/#CSR"
CI_URI = "http://www.example.org/xmldsig-csr/#CI"
STI_URI = "http://www.example.org/xmldsig-csr/#STI"
CRI_URI = "http://www.example.org/xmldsig-csr/#CRI"
SEAL_URI = "http://www.example.org/xmldsig-csr/#Seal"

Encoding = Literal["base64", "hex"]
Which = Literal["STI", "CRI"]

_HEX_DASH = re.compile(r"^[0-9A-Fa-f]{2}(?:-[0-9A-Fa-f]{2})*$")


def encode_digest(value: bytes, encoding: Encoding = "base64") -> str:
    if encoding == "base64":
        return base64.b64encode(value).decode("ascii")
    if encoding == "hex":
        return "-".join(f"{b:02X}" for b in value)
    raise ValueError(f"unknown digest encoding {encoding!r}")


def decode_digest(text: str, width: int | None = None) -> bytes:
    """Decode a DigestValue in either supported encoding, detected from its shape.

    Anything containing a dash is read as hex pairs; everything else as base64.
    """
    text = "".join(text.split())
    if "-" in text or (len(text) == 2 and _HEX_DASH.match(text)):
        if not _HEX_DASH.match(text):
            raise DigestFormatError(f"malformed hex DigestValue {text!r}")
        value = bytes.fromhex(text.replace("-", ""))
    else:
        try:
            value = base64.b64decode(text, validate=True)
        except (binascii.Error, ValueError):
            raise DigestFormatError(f"DigestValue {text!r} is neither base64 nor hex pairs") from None
    if width is not None and len(value) != width:
        raise DigestFormatError(f"DigestValue decodes to {len(value)} octets, expected {width}")
    return value


# -- schema validation -----------------------------------------------------------

_SEQUENCES = {
    "STI": ("STIGenerate", "DigestMethod", "DigestValue"),
    "CRI": ("CRIGenerate", "RelatedNode", "DigestMethod", "DigestValue"),
}
_ALGORITHM_ELEMENTS = {"STIGenerate", "CRIGenerate", "DigestMethod"}


@dataclass(frozen=True)
class SchemaVerdict:
    valid: bool
    errors: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.valid


def schema_errors(node: XmlNode, which: Which) -> list[str]:
    """Violations of the STI or CRI schema by an already-parsed element.

    The root may carry a ``name`` attribute (the published examples do);
    namespace declarations are not part of the tree and are ignored.
    """
    errors: list[str] = []
    if node.name != which:
        return [f"root element is <{node.name}>, expected <{which}>"]
    extra = [k for k, _ in node.attributes if k != "name"]
    if extra:
        errors.append(f"<{which}> has undeclared attributes {extra}")
    expected = _SEQUENCES[which]
    names = tuple(c.name for c in node.children)
    if names != expected:
        errors.append(f"<{which}> children are {list(names)}, expected sequence {list(expected)}")
    for child in node.children:
        if child.name not in expected:
            continue
        if child.children:
            errors.append(f"<{child.name}> must not contain elements")
        if child.name in _ALGORITHM_ELEMENTS:
            bad = [k for k, _ in child.attributes if k != "Algorithm"]
            if bad:
                errors.append(f"<{child.name}> has undeclared attributes {bad}")
            if child.value:
                errors.append(f"<{child.name}> must be empty")
        elif child.attributes:
            errors.append(f"<{child.name}> must not carry attributes")
    return errors


def validate_schema(xml: bytes | str | XmlNode, which: Which) -> SchemaVerdict:
    """Check an STI or CRI element against its schema; never raises."""
    if which not in _SEQUENCES:
        raise ValueError(f"which must be 'STI' or 'CRI', got {which!r}")
    if isinstance(xml, XmlNode):
        node = xml
    else:
        try:
            node = parse_document(xml)
        except (XmlParseError, ValidationError) as exc:
            return SchemaVerdict(False, (f"not well-formed: {exc}",))
    errors = schema_errors(node, which)
    return SchemaVerdict(not errors, tuple(errors))


# -- records ---------------------------------------------------------------------


@dataclass(frozen=True)
class StiRecord:
    digest_value: bytes
    digest_method: str = HashAlgorithm.SHA1.uri
    generate_algorithm: str = STI_URI

    @property
    def algorithm(self) -> HashAlgorithm:
        return HashAlgorithm.from_uri(self.digest_method)

    def to_node(self, encoding: Encoding = "base64") -> XmlNode:
        return XmlNode(
            "STI",
            attributes=(("name", "structure integrity"),),
            children=(
                XmlNode("STIGenerate", attributes=(("Algorithm", self.generate_algorithm),)),
                XmlNode("DigestMethod", attributes=(("Algorithm", self.digest_method),)),
                XmlNode("DigestValue", encode_digest(self.digest_value, encoding)),
            ),
        )


@dataclass(frozen=True)
class CriRecord:
    related_nodes: tuple[str, ...]
    digest_value: bytes
    digest_method: str = HashAlgorithm.SHA1.uri
    generate_algorithm: str = CRI_URI

    def __post_init__(self) -> None:
        object.__setattr__(self, "related_nodes", tuple(self.related_nodes))
        if not self.related_nodes:
            raise ManifestError("CRI record needs at least one RelatedNode")
        for s in self.related_nodes:
            if not s or any(ch.isspace() for ch in s):
                raise ManifestError(f"RelatedNode selector {s!r} is empty or contains whitespace")

    @property
    def algorithm(self) -> HashAlgorithm:
        return HashAlgorithm.from_uri(self.digest_method)

    def to_node(self, encoding: Encoding = "base64") -> XmlNode:
        return XmlNode(
            "CRI",
            attributes=(("name", "referential integrity"),),
            children=(
                XmlNode("CRIGenerate", attributes=(("Algorithm", self.generate_algorithm),)),
                XmlNode("RelatedNode", " ".join(self.related_nodes)),
                XmlNode("DigestMethod", attributes=(("Algorithm", self.digest_method),)),
                XmlNode("DigestValue", encode_digest(self.digest_value, encoding)),
            ),
        )


def _facet_fields(node: XmlNode, which: str) -> tuple[str, str, str]:
    """(generate algorithm, digest method, encoded value) from a schema-valid element."""
    by_name = {c.name: c for c in node.children}
    generate = by_name[f"{which}Generate"].attribute("Algorithm", "")
    method = by_name["DigestMethod"].attribute("Algorithm")
    if method is None:
        raise ManifestError(f"<{which}>/<DigestMethod> lacks an Algorithm")
    return generate, method, by_name["DigestValue"].value


def _algorithm_of(uri: str, where: str) -> HashAlgorithm:
    try:
        return HashAlgorithm.from_uri(uri)
    except ValueError as exc:
        raise ManifestError(f"<{where}>/<DigestMethod>: {exc}") from None


def sti_from_node(node: XmlNode) -> StiRecord:
    errors = schema_errors(node, "STI")
    if errors:
        raise ManifestError("; ".join(errors))
    generate, method, encoded = _facet_fields(node, "STI")
    width = _algorithm_of(method, "STI").width
    return StiRecord(decode_digest(encoded, width), method, generate)


def cri_from_node(node: XmlNode) -> CriRecord:
    errors = schema_errors(node, "CRI")
    if errors:
        raise ManifestError("; ".join(errors))
    generate, method, encoded = _facet_fields(node, "CRI")
    width = _algorithm_of(method, "CRI").width
    related = tuple(node.children[1].value.split())
    return CriRecord(related, decode_digest(encoded, width), method, generate)


def parse_sti(xml: bytes | str) -> StiRecord:
    return sti_from_node(parse_document(xml))


def parse_cri(xml: bytes | str) -> CriRecord:
    return cri_from_node(parse_document(xml))


# -- manifest --------------------------------------------------------------------


@dataclass(frozen=True)
class IntegrityManifest:
    target: str
    algorithm: HashAlgorithm
    sti: StiRecord
    content_digest: bytes
    csr_digest: bytes
    cri: CriRecord | None = None
    timestamp: str | None = None
    seal: bytes | None = field(default=None)

    def __post_init__(self) -> None:
        width = self.algorithm.width
        checks = [("content", self.content_digest), ("STI", self.sti.digest_value), ("CSR", self.csr_digest)]
        if self.cri is not None:
            checks.append(("CRI", self.cri.digest_value))
        if self.seal is not None:
            checks.append(("seal", self.seal))
        for what, value in checks:
            if len(value) != width:
                raise DigestFormatError(
                    f"{what} digest is {len(value)} octets, {self.algorithm.name} needs {width}"
                )
        if (self.seal is None) != (self.timestamp is None):
            raise ManifestError("a seal and its timestamp must appear together")
        for record in (self.sti, self.cri):
            if record is not None and record.algorithm is not self.algorithm:
                raise ManifestError("all DigestMethods in a manifest must name the same algorithm")

    @classmethod
    def from_digest(
        cls,
        csr: CsrDigest,
        target: str,
        context: Iterable[str] = (),
        algo: HashAlgorithm | str | None = None,
    ) -> "IntegrityManifest":
        algorithm = csr.algorithm if algo is None else HashAlgorithm.parse(algo)
        if algorithm is not csr.algorithm:
            raise ManifestError(f"digest was computed with {csr.algorithm.name}, not {algorithm.name}")
        related = tuple(dict.fromkeys(context))
        if bool(related) != bool(csr.cri):
            raise ManifestError("context selectors and the CRI digest must be both present or both absent")
        cri = CriRecord(related, csr.cri, algorithm.uri) if related else None
        return cls(
            target=target,
            algorithm=algorithm,
            sti=StiRecord(csr.st.value, algorithm.uri),
            content_digest=csr.ci.value,
            csr_digest=csr.csr.value,
            cri=cri,
            timestamp=csr.timestamp,
            seal=csr.seal.value if csr.seal is not None else None,
        )

    def to_node(self, encoding: Encoding = "base64") -> XmlNode:
        method = self.algorithm.uri
        children = [
            XmlNode(
                "Reference",
                attributes=(("URI", self.target),),
                children=(
                    XmlNode("DigestMethod", attributes=(("Algorithm", CSR_URI),)),
                    XmlNode("DigestValue", encode_digest(self.csr_digest, encoding)),
                ),
            ),
            _facet_node("CI", "content integrity", CI_URI, method, self.content_digest, encoding),
            self.sti.to_node(encoding),
        ]
        if self.cri is not None:
            children.append(self.cri.to_node(encoding))
        if self.seal is not None:
            children.append(_facet_node("Seal", "timestamp seal", SEAL_URI, method, self.seal, encoding))
        attrs = [("xmlns", NAMESPACE)]
        if self.timestamp is not None:
            attrs.append(("created", self.timestamp))
        return XmlNode("IntegrityManifest", attributes=tuple(attrs), children=tuple(children))

    def to_xml(self, encoding: Encoding = "base64") -> bytes:
        return serialize(self.to_node(encoding))


def _facet_node(
    name: str, label: str, generate: str, method: str, value: bytes, encoding: Encoding
) -> XmlNode:
    return XmlNode(
        name,
        attributes=(("name", label),),
        children=(
            XmlNode(f"{name}Generate", attributes=(("Algorithm", generate),)),
            XmlNode("DigestMethod", attributes=(("Algorithm", method),)),
            XmlNode("DigestValue", encode_digest(value, encoding)),
        ),
    )


def emit_manifest(
    csr: CsrDigest,
    target: str,
    context: Iterable[str] = (),
    algo: HashAlgorithm | str | None = None,
    encoding: Encoding = "base64",
) -> bytes:
    return IntegrityManifest.from_digest(csr, target, context, algo).to_xml(encoding)


def _expect(node: XmlNode, names: tuple[str, ...], where: str) -> None:
    got = tuple(c.name for c in node.children)
    if got != names:
        raise ManifestError(f"<{where}> children are {list(got)}, expected {list(names)}")


def _generic_facet(node: XmlNode, generate_uri: str) -> tuple[str, str]:
    name = node.name
    _expect(node, (f"{name}Generate", "DigestMethod", "DigestValue"), name)
    generate, method, encoded = _facet_fields(node, name)
    if generate != generate_uri:
        raise ManifestError(f"<{name}Generate> Algorithm is {generate!r}, expected {generate_uri!r}")
    return method, encoded


def parse_manifest(xml: bytes | str) -> IntegrityManifest:
    """Parse an emitted manifest; schema violations raise :class:`ManifestError`
    naming the offending element, bad DigestValues :class:`DigestFormatError`."""
    try:
        root = parse_document(xml)
    except (XmlParseError, ValidationError) as exc:
        raise ManifestError(f"manifest is not well-formed XML: {exc}") from None
    if root.name != "IntegrityManifest":
        raise ManifestError(f"root element is <{root.name}>, expected <IntegrityManifest>")
    names = [c.name for c in root.children]
    expected = ["Reference", "CI", "STI"]
    expected += [n for n in ("CRI", "Seal") if n in names]
    if names != expected:
        raise ManifestError(f"<IntegrityManifest> children are {names}, expected {expected}")
    by_name = {c.name: c for c in root.children}

    ref = by_name["Reference"]
    target = ref.attribute("URI")
    if not target:
        raise ManifestError("<Reference> lacks a URI")
    _expect(ref, ("DigestMethod", "DigestValue"), "Reference")
    if ref.children[0].attribute("Algorithm") != CSR_URI:
        raise ManifestError(f"<Reference>/<DigestMethod> must be {CSR_URI!r}")

    sti = sti_from_node(by_name["STI"])
    algorithm = sti.algorithm
    width = algorithm.width

    ci_method, ci_encoded = _generic_facet(by_name["CI"], CI_URI)
    if _algorithm_of(ci_method, "CI") is not algorithm:
        raise ManifestError("<CI>/<DigestMethod> disagrees with <STI>/<DigestMethod>")

    cri = cri_from_node(by_name["CRI"]) if "CRI" in by_name else None

    timestamp = root.attribute("created")
    seal = None
    if "Seal" in by_name:
        seal_method, seal_encoded = _generic_facet(by_name["Seal"], SEAL_URI)
        if _algorithm_of(seal_method, "Seal") is not algorithm:
            raise ManifestError("<Seal>/<DigestMethod> disagrees with <STI>/<DigestMethod>")
        if timestamp is None:
            raise ManifestError("<Seal> present but <IntegrityManifest> has no created timestamp")
        seal = decode_digest(seal_encoded, width)
    elif timestamp is not None:
        raise ManifestError("created timestamp present without a <Seal>")

    return IntegrityManifest(
        target=target,
        algorithm=algorithm,
        sti=sti,
        content_digest=decode_digest(ci_encoded, width),
        csr_digest=decode_digest(ref.children[1].value, width),
        cri=cri,
        timestamp=timestamp,
        seal=seal,
    )
