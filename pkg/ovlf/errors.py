"""
Exception hierarchy for the overlap-free word toolkit
"""


class OvlfError(ValueError):
    """Base class for every error raised by the toolkit"""


class LimitExceeded(OvlfError):
    """A requested size is over the configured memory or depth cap"""

    def __init__(self, what: str, requested: int, cap: int):
        self.what = what
        self.requested = requested
        self.cap = cap
        super().__init__(f"{what}: requested {requested} exceeds cap {cap}")


class LengthMismatch(OvlfError):
    pass


class EmptyWord(OvlfError):
    pass


class MissingTailLetter(OvlfError):
    """A path ending in 0^ω was given without its tail letter"""


class InvalidPath(OvlfError):
    pass


class InvalidExponent(OvlfError):
    pass


class ZeroShift(OvlfError):
    pass


class SpecSyntaxError(OvlfError):
    """Text could not be parsed as a word, word spec, path or rational"""


__all__ = [
    'OvlfError',
    'LimitExceeded',
    'LengthMismatch',
    'EmptyWord',
    'MissingTailLetter',
    'InvalidPath',
    'InvalidExponent',
    'ZeroShift',
    'SpecSyntaxError',
]
