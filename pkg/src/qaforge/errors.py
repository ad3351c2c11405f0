"""Exception hierarchy shared across the package.

The CLI maps these onto its stable exit codes: configuration problems
exit 1, file/corpus problems exit 2, provider failures exit 3, and a
run aborted by the failure-rate policy exits 4.
"""


class QaforgeError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(QaforgeError):
    """Invalid generation configuration (parse or validation failure)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])


class CorpusError(QaforgeError):
    """Corpus file unreadable or malformed."""


class PlanError(QaforgeError):
    """Invalid sampling-plan request."""


class ProviderError(QaforgeError):
    """Non-retryable provider failure (bad status, auth, malformed reply)."""

    def __init__(self, message, status=None, body_excerpt=None):
        super().__init__(message)
        self.status = status
        self.body_excerpt = body_excerpt


class ProviderTimeoutError(ProviderError):
    """Provider unreachable or still failing after the configured retries."""


class EmbeddingError(QaforgeError):
    """Embedding backend failure (missing key, dimension mismatch)."""


class CandidateParseError(QaforgeError):
    """Model output contained no parseable question/answer lines."""

    def __init__(self, message, raw_text=""):
        super().__init__(message)
        self.raw_text = raw_text


class JudgeError(QaforgeError):
    """Judge reply could not be parsed into a verdict."""

    def __init__(self, message, raw_text=""):
        super().__init__(message)
        self.raw_text = raw_text


class RunAbortedError(QaforgeError):
    """Generation run exceeded the configured failure-rate threshold."""

    def __init__(self, message, failures=0, total=0):
        super().__init__(message)
        self.failures = failures
        self.total = total


class TaggerError(QaforgeError):
    """Part-of-speech tagger failure (bad weights file, missing resource)."""


class TagAlignmentError(TaggerError):
    """External tagger returned a tag count that does not match the tokens."""


class MetricError(QaforgeError):
    """Diversity metric called with input outside its domain."""
