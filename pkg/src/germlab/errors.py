"""Exception types shared across the toolkit."""


class GermlabError(ValueError):
    """Base class for all toolkit errors."""


class SchemaError(GermlabError):
    """A JSON document is malformed, has unknown fields, or bad values."""
