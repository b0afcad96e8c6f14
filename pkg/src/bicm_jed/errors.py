class ConfigError(ValueError):
    """Inconsistent sizes, unsupported options or malformed run configuration."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""
