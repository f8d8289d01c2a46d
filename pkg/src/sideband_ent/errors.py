"""Exception types shared across the package.

The CLI maps each class to a fixed exit status, so library code raises these
rather than bare ``ValueError`` whenever the distinction matters to a caller.
"""


class ValidationError(ValueError):
    """Input matrix or state fails a structural or physical check."""


class DomainError(ValueError):
    """Physical parameters outside the range where the model is defined."""


class ConfigError(ValueError):
    """Malformed configuration document.

    ``problems`` holds one human-readable line per offending key or line.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class OracleError(RuntimeError):
    """Moment propagation produced a result that cannot be trusted."""
