"""CSR integrity digests for XML: content, structure and context-referential
integrity with timestamp sealing, plus the DOM-HASH, XHASH and Bertino
baselines and a benchmark harness."""

from .baselines import bertino_digest, dom_hash_digest, xhash_digest
from .csr import (
    CsrDigest,
    Facet,
    Verdict,
    content_integrity,
    context_referential_integrity,
    csr_digest,
    facet_report,
    structure_integrity,
    timestamped_seal,
    verify,
)
from .errors import (
    CsrError,
    DigestFormatError,
    ManifestError,
    SelectorError,
    ValidationError,
    XmlParseError,
)
from .hashing import Digest, HashAlgorithm, HashCounter
from .manifest import IntegrityManifest, emit_manifest, parse_manifest, validate_schema
from .tree import NodeLabel, NodePath, XmlNode, canonical_bytes, node_label, node_path, parse_document, select_node

__version__ = "0.1.0"

__all__ = [
    "CsrDigest", "CsrError", "Digest", "DigestFormatError", "Facet", "HashAlgorithm", "HashCounter",
    "IntegrityManifest", "ManifestError", "NodeLabel", "NodePath", "SelectorError", "ValidationError",
    "Verdict", "XmlNode", "XmlParseError", "bertino_digest", "canonical_bytes", "content_integrity",
    "context_referential_integrity", "csr_digest", "dom_hash_digest", "emit_manifest", "facet_report",
    "node_label", "node_path", "parse_document", "parse_manifest", "select_node", "structure_integrity",
    "timestamped_seal", "validate_schema", "verify", "xhash_digest",
]
