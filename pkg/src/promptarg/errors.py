"""Exception hierarchy shared across the package.

Every error carries a `category` used by the CLI to pick an exit code, so
callers can distinguish bad usage from bad data from runtime failures.
"""


class PromptargError(Exception):
    category = "error"


class UsageError(PromptargError):
    """Caller violated an operation's contract (bad argument, bad call order)."""

    category = "usage"


class ConfigurationError(PromptargError):
    """Invalid or incomplete run configuration."""

    category = "config"


class ParseError(PromptargError):
    """Input file could not be parsed."""

    category = "data"


class FormatError(PromptargError):
    """Input file parsed but does not match the documented schema."""

    category = "data"


class ValidationError(PromptargError):
    """Parsed data violates an invariant (e.g. span out of bounds)."""

    category = "data"


class IntegrityError(PromptargError):
    """Cross-references between records do not line up."""

    category = "data"


class OntologyError(PromptargError):
    """Event type or role missing from the ontology."""

    category = "data"


class PathError(PromptargError):
    """A referenced artifact does not exist."""

    category = "path"


class ModelError(PromptargError):
    """Encoder or head failure during a forward pass."""

    category = "runtime"


class TransportError(PromptargError):
    """LLM API call failed after exhausting retries."""

    category = "runtime"


class TransientApiError(PromptargError):
    """Retryable API failure (rate limit, 5xx, connection drop)."""

    category = "runtime"
