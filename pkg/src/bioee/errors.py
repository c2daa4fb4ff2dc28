"""Exception hierarchy shared across the toolkit."""


class BioeeError(Exception):
    """Base class for all toolkit errors."""


class MalformedLine(BioeeError):
    """A standoff record could not be parsed."""


class SpanMismatch(BioeeError):
    """Annotation surface text does not equal the document text at its offsets."""


class DanglingReference(BioeeError):
    """An annotation references an id that does not exist in the document."""


class CyclicEvent(BioeeError):
    """The event reference graph contains a cycle."""


class CompositionViolation(BioeeError):
    """An event's arguments violate the composition registry for its type."""


class MissingFile(BioeeError):
    """A corpus document is missing one of its standoff files."""


class OverlapConflict(BioeeError):
    """Trigger and argument spans overlap, so markers cannot be placed."""


class TooManyArguments(BioeeError):
    """Candidate enumeration would exceed the subset cap."""


class ScorerUnavailable(BioeeError):
    """A scorer backend could not be reached."""


class ProtocolViolation(BioeeError):
    """A scorer service response broke the wire protocol contract."""


class UnknownInstance(BioeeError):
    """An oracle was asked about an instance outside its gold annotations."""


class DocIdMismatch(BioeeError):
    """Gold and predicted document collections are not aligned by doc_id."""
