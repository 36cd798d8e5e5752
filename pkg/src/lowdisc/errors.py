"""Exception hierarchy shared by all lowdisc modules."""


class LowdiscError(Exception):
    """Base class for every error raised by lowdisc."""


class DomainError(LowdiscError, ValueError):
    """An argument lies outside the stated domain of an operation."""


class UnsupportedExponentError(DomainError):
    pass


class PoleError(DomainError):
    """A term ``1/||m alpha||`` with ``||m alpha|| = 0`` would be required."""


class UnknownConstantError(DomainError):
    pass


class PrecisionExhaustedError(LowdiscError):
    """The requested precision cannot be reached.

    ``index`` is the continued fraction index (or precision in bits) that was
    reached before giving up.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NeedsMoreTermsError(LowdiscError):
    """A convergent table is too short; ``required`` is a sufficient length."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class RankError(LowdiscError, ValueError):
    pass
