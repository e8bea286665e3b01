class AixiLabError(Exception):
    """Base class for all library errors."""


class DivisorNotSeparated(AixiLabError):
    pass


class ConditioningOnNull(AixiLabError):
    """The conditioning history has measure zero."""


class ExactUnavailable(AixiLabError):
    pass


class NormalizationSingular(AixiLabError):
    """A positive-mass prefix has no mass on any one-step continuation."""


class SearchBudgetExceeded(AixiLabError):
    pass


class AlphabetMismatch(AixiLabError):
    pass


class Unresolvable(AixiLabError):
    """Value enclosures could not separate the candidate actions in budget."""


class BudgetExhausted(AixiLabError):
    pass


class SpecError(AixiLabError):
    """A spec file or command-line specification is malformed."""
