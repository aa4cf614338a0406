"""Exceptions shared across the toolkit."""


class BudgetExceededError(RuntimeError):
    """A brute-force search or enumeration would exceed the configured budget."""


class NotPreorderError(ValueError):
    """The interior relation R is not reflexive and transitive."""


class NotS4DConeError(ValueError):
    """The frame is not an S4D-cone (required by the Alexandroff-with-selected-points view)."""


class NotS4DT0ConeError(ValueError):
    """The frame is not an S4DT0-cone (required by the covering-space construction)."""


class SpaceMismatchError(ValueError):
    """Operands live in different spaces."""
