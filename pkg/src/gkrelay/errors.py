"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class UnsupportedClassError(ValueError):
    """A Meijer-G order combination the evaluator does not handle."""


class NonConvergenceError(ArithmeticError):
    """A series or iteration failed to settle within its budget.

    Attributes
    ----------
    terms : int
        Number of terms (or iterations) consumed before giving up.
    operation : str
        Name of the operation that failed.
    """

    def __init__(self, message, terms=0, operation=""):
        super().__init__(message)
        self.terms = terms
        self.operation = operation


class IllConditionedError(NonConvergenceError):
    """A residue sum converged but cancellation destroyed too many digits."""

    def __init__(self, message, condition, terms=0, operation=""):
        super().__init__(message, terms=terms, operation=operation)
        self.condition = condition


class ParameterError(DomainError):
    """A model parameter is invalid.

    Attributes
    ----------
    name : str
        Name of the offending parameter (e.g. ``"k"``), so that front ends
        can point at the exact key of a scenario file.
    """

    def __init__(self, name, message):
        super().__init__("%s: %s" % (name, message))
        self.name = name
