"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class CsrError(Exception):
    """Base class for all errors raised by csrdigest."""


class XmlParseError(CsrError):
    """Input is not well-formed XML."""

    def __init__(self, message: str, offset: int | None = None) -> None:
        self.offset = offset
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)


class ValidationError(CsrError, ValueError):
    """Input parsed but violates a model invariant (duplicate attribute, bad timestamp)."""


class SelectorError(CsrError, LookupError):
    """A node selector did not resolve to exactly one node."""


class ManifestError(CsrError):
    """An integrity manifest violates the STI/CRI schemas or the manifest layout."""


class DigestFormatError(ManifestError):
    """A DigestValue could not be decoded or has the wrong width."""
