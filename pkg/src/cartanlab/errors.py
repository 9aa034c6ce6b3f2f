"""Exception types shared across the laboratory.

Every failure mode named by an operation contract maps onto one of these,
so callers can distinguish bad inputs from numerical breakdown.
"""


class CartanLabError(Exception):
    """Base class for all laboratory errors."""


class ContractError(CartanLabError):
    """A structural precondition was violated (shape, hermiticity, grid size)."""


class DomainError(CartanLabError):
    """An argument lies outside the mathematical domain of the operation."""


class ParameterError(CartanLabError):
    """A spectral or family parameter is outside its admissible range."""


class DivergenceError(CartanLabError):
    """A series or iteration cannot converge for the given input."""


class ConditioningError(CartanLabError):
    """A linear solve was requested on a matrix too ill-conditioned to trust."""


class GenerationError(CartanLabError):
    """Random generation failed to produce a point satisfying its constraints."""
