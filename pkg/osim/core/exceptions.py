"""
Custom exceptions for osim
==========================

Every error raised by the core package derives from ``OsimError`` so callers
(the CLI, the HTTP routers, batch runs) can catch the whole family at once.
"""


class OsimError(Exception):
    """Base exception for osim errors."""
    pass


class ParamOutOfDomainError(OsimError):
    """Raised when a parameter lies outside its admissible domain."""
    pass


# --- Generators ---
class GeneratorError(OsimError):
    """Base exception for Archimedean generator errors."""
    pass


class UnknownGeneratorError(GeneratorError):
    """Raised when a generator name is not in the builtin registry."""
    pass


class DegenerateDenominatorError(GeneratorError):
    """Raised when a diagnostic ratio has a vanishing denominator."""
    pass


class DerivativeUnavailableError(GeneratorError):
    """Raised when a derivative order is neither analytic nor finite-differenceable."""
    pass


class RootNotBracketedError(GeneratorError):
    """Raised when a root search bracket does not contain a sign change."""
    pass


class GeneratorValidationError(GeneratorError):
    """Raised when a generator fails d-monotonicity where validity is required."""
    pass


# --- Distributions ---
class DistributionError(OsimError):
    """Base exception for marginal distribution errors."""
    pass


class UnknownDistributionError(DistributionError):
    """Raised when a distribution name is not in the builtin registry."""
    pass


class GridOutsideSupportError(DistributionError):
    """Raised when an evaluation grid leaves the support of a distribution."""
    pass


# --- Ordered models ---
class ModelError(OsimError):
    """Base exception for DSOS/DGOS model errors."""
    pass


class InvalidGammaError(ModelError):
    """Raised when a DGOS parameter vector yields a non-positive gamma."""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"gamma_{index} = {value} is not positive")


class PresetNeedsIndependenceError(ModelError):
    """Raised when a preset is only defined for the independence generator."""
    pass


class UnknownPresetError(ModelError):
    """Raised when a preset name is not known."""
    pass


class SupportExhaustedError(ModelError):
    """Raised when consecutive right endpoints decrease."""
    pass


class NotIncreasingError(ModelError):
    """Raised when a point passed to a joint density is not strictly increasing."""
    pass


class CumHazardOverflowError(ModelError):
    """Raised when a draw runs past a finite right endpoint in strict mode."""
    pass


# --- Orderings ---
class OrderingError(OsimError):
    """Base exception for stochastic ordering checks."""
    pass


class UnsupportedModeError(OrderingError):
    """Raised when a relation is requested in a mode it has no checker for."""
    pass


class GridTooCoarseError(OrderingError):
    """Raised when an evaluation grid has fewer points than the check requires."""
    pass


class DimensionMismatchError(OrderingError):
    """Raised when compared vectors have different dimensions."""
    pass


class NonAnalyticModelError(OrderingError):
    """Raised when an analytic check receives a model it cannot evaluate in closed form."""
    pass


class LengthMismatchError(OrderingError):
    """Raised when majorization inputs differ in length."""
    pass


class NonPositiveEntryError(OrderingError):
    """Raised when a product or reciprocal majorization receives a non-positive entry."""
    pass


class EmptySampleError(OrderingError):
    """Raised when a sample has no rows left to compare."""
    pass


# --- Harness ---
class HarnessError(OsimError):
    """Base exception for scenario harness errors."""
    pass


class UnknownScenarioError(HarnessError):
    """Raised when a scenario id is not in the catalog."""
    pass


class ConfigParseError(HarnessError):
    """Raised when an experiment config cannot be read; names the offending field."""

    def __init__(self, message: str, field: str = ""):
        self.field = field
        super().__init__(message)
