# src/exceptions.py

"""
Exception types raised by the toolkit.

Everything derived from `CptwError` is a data, format or parameter problem and
is reported by the command line with exit code 2.
"""


class CptwError(Exception):
    """Base class for all toolkit errors."""


class EmbeddingFormatError(CptwError):
    """An embedding file could not be parsed."""


class DatasetError(CptwError):
    """A dataset, split file or corpus input is malformed or empty."""


class MatrixFileError(CptwError):
    """A file is not a valid propagation matrix or vector file."""


class VocabularyMismatchError(CptwError):
    """A precomputed matrix was built over a different vocabulary."""

    def __init__(self, expected: str, actual: str):
        super().__init__(
            f"vocabulary hash mismatch: matrix was built for {actual}, "
            f"corpus has {expected}"
        )
        self.expected = expected
        self.actual = actual


class ParameterError(CptwError, ValueError):
    """A numeric parameter is outside its allowed range."""


class EvaluationError(CptwError):
    """The evaluation protocol cannot run on the given data."""


class IicrError(CptwError):
    """The inter-vs-intra class ratio is undefined for the given data."""


class DegenerateIicrError(IicrError):
    """A class has zero intra-class distance, so its ratio is infinite."""
