"""Error taxonomy shared across the package.

The CLI maps these onto exit codes: validation and hypothesis failures
exit 1, budget overruns exit 2, malformed input exits 3.
"""


class ValidationError(ValueError):
    """Structural data fails its invariants (bad algebra, module, map, ...)."""

    def __init__(self, message: str, failures=None):
        super().__init__(message)
        self.failures = list(failures) if failures is not None else []


class HypothesisError(ValueError):
    """A required mathematical hypothesis or gate is not satisfied."""


class BudgetExceededError(RuntimeError):
    """An enumeration would exceed the configured search budget."""


class MalformedInputError(ValueError):
    """Input file or request cannot be parsed against the expected schema."""


class InternalInconsistencyError(RuntimeError):
    """A construction guaranteed by theory failed; indicates a bug upstream."""
