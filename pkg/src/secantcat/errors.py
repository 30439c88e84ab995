"""Exception types raised across the toolkit."""


class SecantcatError(Exception):
    pass


class RingMismatch(SecantcatError):
    pass


class ModeMismatch(SecantcatError):
    pass


class ArityMismatch(SecantcatError):
    pass


class ParseError(SecantcatError):
    pass


class NoGB(SecantcatError):
    pass


class NotHomogeneous(SecantcatError):
    pass


class BudgetExceeded(SecantcatError):
    """Raised when a Buchberger run processes more pairs than allowed."""

    def __init__(self, max_pairs, message=None):
        self.max_pairs = max_pairs
        super().__init__(message or f"pair budget of {max_pairs} exhausted")


class ModeUnsupported(SecantcatError):
    pass


class UnsupportedProvenance(SecantcatError):
    pass


class DependentSections(SecantcatError):
    pass


class CaseMismatch(SecantcatError):
    pass


class RankDeficientInclusion(SecantcatError):
    pass


class NotSumOfSquares(SecantcatError):
    pass


class InvalidSpec(SecantcatError):
    pass
