"""Exception hierarchy.

``InputError`` subclasses signal bad input files or arguments (CLI exit
code 2); everything else derived from ``AttrLinkError`` is a runtime
failure (exit code 3).
"""


class AttrLinkError(Exception):
    pass


class InputError(AttrLinkError, ValueError):
    pass


class FormatError(InputError):
    pass


class DuplicateIdError(InputError):
    pass


class UnknownEntityError(AttrLinkError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class LengthMismatchError(InputError):
    pass


class AlignmentError(InputError):
    pass


class OverlapError(InputError):
    pass


class RangeError(InputError, IndexError):
    pass


class EmptyDatasetError(InputError):
    pass


class UnknownTagError(InputError):
    pass


class UnknownTypeError(InputError):
    pass


class EmptyCatalogError(InputError):
    pass


class IndexConfigMismatchError(InputError):
    pass


class DimensionMismatchError(AttrLinkError, ValueError):
    pass


class DegenerateDatasetError(InputError):
    pass


class InsufficientPositivesError(InputError):
    pass


class MissingModelError(AttrLinkError):
    pass
