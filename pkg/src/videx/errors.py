"""Shared exception types.

Every error carries a stable machine-readable ``code`` so the CLI and the
HTTP service can surface the same diagnostics.
"""


class VidexError(Exception):
    """Base class for all library errors."""

    code = "error"


class OntologyParseError(VidexError):
    """The ontology document is not well-formed."""

    code = "parse"


class OntologyValidationError(VidexError):
    """The ontology document parsed but violates a structural invariant."""

    code = "validation"

    def __init__(self, problems):
        # problems: iterable of (node_id, reason)
        self.problems = list(problems)
        detail = "; ".join(f"{nid}: {reason}" for nid, reason in self.problems)
        super().__init__(f"invalid ontology: {detail}")


class UnknownIdError(VidexError):
    code = "unknown-id"


class NotACategoryError(VidexError):
    code = "not-a-category"


class NotAnEventError(VidexError):
    code = "not-an-event"


class NotAConceptError(VidexError):
    code = "not-a-concept"


class EmptyPoolError(VidexError):
    """A restriction (or an event-less tree) left nothing to match against."""

    code = "empty-pool"


class UnknownCorpusError(VidexError):
    code = "unknown-corpus"


class UnknownVideoError(VidexError):
    code = "unknown-video"


class ChecksumError(VidexError):
    """A score-matrix file failed its declared checksum."""

    code = "checksum"
