"""Error taxonomy shared across the pipeline.

The CLI maps these onto process exit codes: ConfigError -> 2,
DataContractError -> 3, NumericalDivergenceError -> 4.
"""


class DiscoverError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(DiscoverError):
    """Invalid, unknown, or inconsistent configuration."""


class DataContractError(DiscoverError):
    """Input data violates a declared contract (shape, range, counts, hashes)."""


class NumericalDivergenceError(DiscoverError):
    """Training produced a non-finite quantity; carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
