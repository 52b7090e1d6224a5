"""Exception hierarchy for the audit engine.

Every error the library raises on purpose derives from DarkScanError so
callers (CLI, service) can map library failures to exit codes / HTTP
statuses with a single except clause.
"""


class DarkScanError(Exception):
    """Base class for all errors raised by darkscan."""


# --- taxonomy ---------------------------------------------------------------

class UnknownLabel(DarkScanError):
    def __init__(self, raw: str):
        super().__init__(f"unknown category label: {raw!r}")
        self.raw = raw


# --- ingest -----------------------------------------------------------------

class NetworkError(DarkScanError):
    """Transport-level failure while fetching a page."""


class RobotsDisallowed(DarkScanError):
    """robots.txt forbids fetching the URL for our user agent."""


class NotHtml(DarkScanError):
    """Response content type is not an HTML document."""


class TooLarge(DarkScanError):
    """Response body exceeds the configured byte budget."""


class ParseFailure(DarkScanError):
    """Input is too broken to segment (e.g. empty document)."""


# --- classifier -------------------------------------------------------------

class NonFinite(DarkScanError):
    """Score vector contains NaN or infinity."""


class InvalidDistribution(DarkScanError):
    """Probability vector violates the distribution invariants."""


class VocabMissingMarkers(DarkScanError):
    """Vocabulary lacks one of the required marker tokens."""


class ArtifactLoadError(DarkScanError):
    """Model artifact directory is missing or inconsistent."""


class ShapeMismatch(DarkScanError):
    """Model output shape does not match the 8-category contract."""


class EndpointUnavailable(DarkScanError):
    """Remote classification endpoint cannot be reached."""


class MalformedResponse(DarkScanError):
    """Remote endpoint replied with data violating the wire contract."""


# --- detection / reporting --------------------------------------------------

class EmptySite(DarkScanError):
    """No classified segments to aggregate; not the same as a clean site."""


class ModeMismatch(DarkScanError):
    """Reports being compared use different aggregation modes."""


# --- evaluation -------------------------------------------------------------

class FileUnreadable(DarkScanError):
    """Dataset file is missing or cannot be read."""


class MissingHeader(DarkScanError):
    """Dataset CSV lacks the required text/label columns."""


class ClassTooSmall(DarkScanError):
    """A label has too few examples to stratify three ways."""


class LengthMismatch(DarkScanError):
    """Predicted and gold sequences differ in length."""


class EmptyInput(DarkScanError):
    """Operation requires at least one element."""


class DegenerateData(DarkScanError):
    """Training data contains a single class."""


# --- service ----------------------------------------------------------------

class BindFailure(DarkScanError):
    """Service could not bind its address."""
