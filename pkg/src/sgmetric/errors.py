"""Exception hierarchy.

``InputError`` covers malformed data and usage mistakes.  The remaining
classes are *findings*: a mathematical property failed on well-formed input.
"""


class InputError(ValueError):
    """Malformed tables, unknown vertices, bad parameters."""


class Finding(Exception):
    """Base class for mathematical negative results."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class AxiomViolation(Finding):
    """Table data violates a partially ordered commutative semigroup axiom."""

    def __init__(self, report):
        first = report.violations[0]
        super().__init__(f"{first[0]} fails at {first[1]}", witness=first)
        self.report = report


class NonAssociativeError(AxiomViolation):
    pass


class MissingInfimumError(Finding):
    pass


class NoMaximumError(InputError):
    pass


class TriangleError(Finding):
    """A distance triple violates the triangle inequality."""


class AmalgamationError(Finding):
    """Shortest-path amalgamation produced an invalid or forbidden structure."""


class GenericBuildError(AmalgamationError):
    pass
