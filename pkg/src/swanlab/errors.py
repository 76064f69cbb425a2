"""Exception classes shared across swanlab."""


class SwanlabError(Exception):
    """Base class for all library errors."""


class DivisionByZero(SwanlabError, ZeroDivisionError):
    pass


class PrecisionExhausted(SwanlabError):
    """A quantity depends on coefficients beyond the known precision."""


class CapExceeded(SwanlabError):
    """A configured size limit (p, s, degree) was exceeded."""


class InvalidEmbedding(SwanlabError):
    pass


class NoConvergence(SwanlabError):
    """The best-representative reduction hit its iteration cap."""


class BelowThreshold(SwanlabError):
    def __init__(self, t, threshold, strict):
        self.t = t
        self.threshold = threshold
        self.strict = strict
        rel = ">" if strict else ">="
        super().__init__(f"t = {t} does not satisfy t {rel} {threshold}")


class InvalidBreaks(SwanlabError):
    pass


class SearchSpaceTooLarge(SwanlabError):
    pass


class InputError(SwanlabError):
    """Malformed user input (expressions, case files, CLI arguments)."""


class ExprSyntaxError(InputError):
    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class UndefinedVariable(InputError):
    pass


class ZeroDenominator(InputError, ZeroDivisionError):
    pass
