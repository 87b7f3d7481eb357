"""Exception hierarchy shared by all modules."""


class NCDomainError(Exception):
    """Base class for every error raised by the package."""


class SymbolSyntaxError(NCDomainError, ValueError):
    """Symbol text does not follow the grammar.

    ``position`` is the 0-based character offset where parsing failed.
    """

    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}")

    def caret(self):
        """Two-line rendering of the input with a marker under the error."""
        return f"{self.text}\n{' ' * self.position}^"


class ValidationError(NCDomainError, ValueError):
    """A coefficient map violates the positive-regular-symbol conditions."""

    def __init__(self, message, word=None):
        self.word = word
        super().__init__(message)


class EmptyWordCoefficientError(ValidationError):
    pass


class NegativeCoefficientError(ValidationError):
    pass


class MissingLinearTermError(ValidationError):
    pass


class LetterRangeError(ValidationError):
    pass


class ArityError(NCDomainError, ValueError):
    """Arity or dimension of two objects do not agree."""


class ResourceLimitError(NCDomainError):
    """A truncated Fock space would exceed the configured dimension cap."""


class InvalidWitnessError(NCDomainError, ValueError):
    """A witness does not transform one symbol into the other."""


class NotHermitianError(NCDomainError, ValueError):
    pass


class GeometryError(NCDomainError, ValueError):
    """Bad input to a ball automorphism or a degenerate circle fit."""
