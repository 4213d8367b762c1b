"""Exception types shared across the package.

Every failure mode raised on purpose derives from ``OlfwError`` so callers
(and the CLI) can distinguish deliberate validation failures from bugs.
"""

from __future__ import annotations


class OlfwError(Exception):
    """Base class for all deliberate errors raised by this package."""


class InputError(OlfwError, ValueError):
    """Malformed argument: wrong shape, empty bound, non-finite entry, ..."""


class CapacityError(OlfwError, ValueError):
    """A feasibility request cannot be met (e.g. cap smaller than lower bounds)."""


class SingularityError(OlfwError, ArithmeticError):
    """A matrix required to be nonsingular failed factorization."""


class UnsupportedOperationError(OlfwError, NotImplementedError):
    """Operation is not defined for this domain kind."""


class GenerationError(OlfwError, RuntimeError):
    """A random instance generator could not produce a valid instance."""


class DistributionViolationError(OlfwError, ValueError):
    """An observed sample falls outside the declared distribution support."""


class DegenerateProblemError(OlfwError, ValueError):
    """Problem constants make the parameter formulas meaningless (e.g. beta = 0)."""


class ConfigError(OlfwError, ValueError):
    """Config file failed validation.  Collects every offending field."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid config: " + "; ".join(self.problems))
