"""Shared exception types."""


class InvariantViolation(ValueError):
    """A structural invariant of a value type does not hold."""


class ContractViolation(ValueError):
    """A caller-supplied callback or argument broke its stated contract."""
