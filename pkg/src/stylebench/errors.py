"""Exception types shared across the pipeline."""


class StylebenchError(Exception):
    """Base class for all package-specific errors."""


class ImageError(StylebenchError):
    """Image decode/encode problem; carries the offending source when known."""

    def __init__(self, message, source=None):
        if source:
            message = f"{message} ({source})"
        super().__init__(message)
        self.source = source


class CorruptImageError(ImageError):
    """Input bytes could not be decoded as image data."""


class UnsupportedFormatError(ImageError):
    """Input decodes to a format outside the PNG/JPEG contract."""


class DimensionMismatchError(StylebenchError, ValueError):
    """Two planes/images that must share dimensions do not."""


class ChannelMismatchError(StylebenchError, ValueError):
    """Channel counts incompatible for the requested operation."""


class WindowTooLargeError(StylebenchError, ValueError):
    """Image smaller than the SSIM window."""


class BackendError(StylebenchError):
    """External stylizer backend failure; carries the backend identity."""

    def __init__(self, message, backend=None):
        if backend:
            message = f"{message} [backend: {backend}]"
        super().__init__(message)
        self.backend = backend


class BackendUnavailableError(BackendError):
    """The configured external backend cannot be reached or started."""


class BackendTimeoutError(BackendError):
    """The external backend did not answer within its timeout."""


class BackendProtocolError(BackendError):
    """The external backend answered, but not with a usable image."""


class GenerationError(StylebenchError):
    """Base class for style-image acquisition failures."""


class AuthError(GenerationError):
    """Missing or rejected credential."""


class RateLimitedError(GenerationError):
    """Remote endpoint throttled the request; retry_after holds the
    advertised delay in seconds when the server sent one."""

    def __init__(self, message, retry_after=None):
        super().__init__(message)
        self.retry_after = retry_after


class RemoteError(GenerationError):
    """Remote endpoint failed (5xx, transport error, malformed body)."""


class MalformedBase64Error(GenerationError):
    """Image payload is not valid base64."""


class FetchError(GenerationError):
    """URL-referenced image payload could not be fetched."""


class ArchiveError(StylebenchError):
    """Run-archive parse or validation failure."""


class UsageError(StylebenchError):
    """Command-line usage problem detected after argument parsing."""
